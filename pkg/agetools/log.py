#!/usr/bin/python3

"""Helpers for building and tearing down named loggers.

Commands print their results on stdout, so console logging goes to
stderr. Ensemble workers are separate processes appending to the same
log file, hence the process id in the file format."""

import sys
import logging

FILE_FORMAT = ('%%(asctime)-8s %s[%%(process)d]: %%(levelname)-8s '
               '%%(filename)s:%%(lineno)-10d %%(message)s')
CONSOLE_FORMAT = '%(levelname)s: %(message)s'


def _add_handler(log, handler, level, fmt):
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt))
    log.addHandler(handler)


def configure_log(name, path=None, to_console=False, level=logging.DEBUG):
    """Return the named logger with a file handler when path is set and
    a stderr handler when to_console is. Handlers from an earlier call
    are released first."""
    log = logging.getLogger(name)
    release_log(log)
    log.setLevel(level)
    log.propagate = False

    if path:
        try:
            _add_handler(log, logging.FileHandler(path), level,
                         FILE_FORMAT % name)
        except IOError as e:
            sys.stderr.write("Cannot log to %s, ignoring: %s\n" % (path, e))

    if to_console:
        _add_handler(log, logging.StreamHandler(sys.stderr), level,
                     CONSOLE_FORMAT)
    return log


def release_log(log):
    if not log:
        return
    while log.handlers:
        handler = log.handlers[0]
        handler.flush()
        log.removeHandler(handler)
        handler.close()
