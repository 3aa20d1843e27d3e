#!/usr/bin/python3

"""Record tables with a fixed header, as written to and read from CSV."""

import os

from agetools import utils


class Table(object):
    """Class for representing a result table which constitutes
    a collection of records sharing one typed header."""

    def __init__(self, fields, types, recs=None, comments=None):
        self.fields = list(fields)
        self.types = dict(types)
        self.recs = list(recs or [])
        self.comments = list(comments or [])

    def __len__(self):
        return len(self.recs)

    def __eq__(self, other):
        if not isinstance(other, Table):
            return NotImplemented
        return self.fields == other.fields and self.recs == other.recs

    def get_fields(self):
        return self.fields

    def get_comments(self):
        return self.comments

    def append(self, rec):
        missing = [field for field in self.fields if field not in rec]
        if missing:
            raise Exception("Error: record lacks fields %s" % missing)
        self.recs.append(dict((field, rec[field]) for field in self.fields))

    def get_rows(self, **match):
        """Return the records whose fields equal every given keyword"""
        matching_rows = []

        for rec in self.recs:
            for key, value in match.items():
                if rec.get(key) != value:
                    break
            else:
                # Record clearly matches the required fields
                matching_rows.append(rec)

        return matching_rows

    def get_column(self, field, **match):
        return [rec[field] for rec in self.get_rows(**match)]

    def get_distinct(self, field):
        values = []
        for rec in self.recs:
            if rec[field] not in values:
                values.append(rec[field])
        return values

    def get_missing(self, table, keys):
        """Compare this table with another passed in, returning the
        records whose key fields have no counterpart there."""
        missing = []
        for rec in self.recs:
            match = dict((key, rec[key]) for key in keys)
            if not table.get_rows(**match):
                missing.append(rec)
        return missing

    def to_csv(self):
        return utils.recs_to_csv_table(self.fields, self.recs, self.comments)

    def write(self, path):
        with open(path, 'w') as fh:
            fh.write(self.to_csv())
        return path

    @classmethod
    def from_csv(cls, text, types):
        comments, header, recs = utils.csv_table_to_recs(text, types)
        fields = header or list(types.keys())
        return cls(fields, types, recs, comments)

    @classmethod
    def read(cls, path, types):
        if not os.path.isfile(path):
            raise IOError("Table file not found: '%s'" % path)
        with open(path, 'r') as fh:
            return cls.from_csv(fh.read(), types)
