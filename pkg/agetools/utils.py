#!/usr/bin/python3

"""Conversion between CSV text tables and lists of records."""

import csv
import io
import math

COMMENT_PREFIX = '#'


def format_value(value):
    """Render a value so that parse_value gives it back unchanged."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isnan(value):
            return 'NA'
        return repr(value)
    return str(value)


def parse_value(text, kind):
    """Convert one CSV cell to the python type named by kind
    ('int', 'float', 'bool' or 'str')."""
    if kind == 'str':
        return text
    if text == '':
        return None
    if kind == 'int':
        return int(text)
    if kind == 'float':
        if text == 'NA':
            return float('nan')
        return float(text)
    if kind == 'bool':
        return text.strip().lower() in ['true', 'yes', '1']
    raise Exception("Error: unknown column type '%s'" % kind)


def csv_table_to_recs(table_string, types=None):
    """Takes a CSV table string and returns a list of records
    matching the header to values. Leading comment lines are
    returned separately."""

    comments = []
    lines = table_string.split('\n')
    while lines and lines[0].startswith(COMMENT_PREFIX):
        comments.append(lines.pop(0)[len(COMMENT_PREFIX):].strip())

    reader = csv.reader(io.StringIO('\n'.join(lines)))
    rows = [row for row in reader if row]
    if not rows:
        return comments, [], []

    # Take the first row as the header
    header = rows.pop(0)
    types = types or {}

    recs = []
    for vals in rows:
        rec = {}
        for key, val in zip(header, vals):
            rec[key] = parse_value(val, types.get(key, 'str'))
        recs.append(rec)

    return comments, header, recs


def recs_to_csv_table(fields, recs, comments=None):
    """Inverse of csv_table_to_recs."""
    out = io.StringIO()
    for comment in comments or []:
        out.write("%s %s\n" % (COMMENT_PREFIX, comment))
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(fields)
    for rec in recs:
        writer.writerow([format_value(rec.get(field)) for field in fields])
    return out.getvalue()
