#!/usr/bin/python3

"""A module for constants, exceptions and logging shared by the
sampler modules"""

import os
import math
import logging

import agetools.log

LOG_NAME = "agesampler"
LOG_ENV = "AGESAMPLER_LOG"
WORKERS_ENV = "AGESAMPLER_WORKERS"
ACCEPTANCE_ENV = "AGESAMPLER_ACCEPTANCE"

INF = float('inf')

# Channel defaults
DEFAULT_M_CAP = 10000
DEFAULT_EPSILON = 0.0
TRUNCATE_REJECT = "reject"
TRUNCATE_CLAMP = "clamp"

# Learner defaults
DEFAULT_V = 1.0
DEFAULT_MOMENTUM_A = 0.005
DEFAULT_PILOT_EPOCHS = 100
PILOT_CAP_FACTOR = 10.0

# Oracle defaults
DEFAULT_ORACLE_N = 1000000
DEFAULT_ORACLE_TOL = 1e-4
MIN_ORACLE_N = 1000
Z_95 = 1.96


def configure_logging(to_console=False, debug=False):
    """Method for configuring Logging"""
    global log
    level = logging.DEBUG if debug else logging.INFO
    log = agetools.log.configure_log(LOG_NAME, os.environ.get(LOG_ENV),
                                     to_console, level)


configure_logging()


def release_logging():
    """Release logging object."""
    if log:
        agetools.log.release_log(log)


def init_logging(debug=False):
    """Reconfigure the package log for an interactive run."""
    release_logging()
    configure_logging(to_console=True, debug=debug)


class ArgumentError(Exception):
    """Raised when a user provides incomplete or missing arguments"""

    def __init__(self, *args):
        Exception.__init__(self, *args)


class ConfigFileNotFound(Exception):
    """Raised when a config or table file does not exist"""

    def __init__(self, *args):
        self.file_name = args[0]
        self.config = args[1]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("%s file not found: '%s'. Please re-specify." % (self.config, self.file_name))  # noqa: E501


class InvalidArgument(ArgumentError):
    """Raised when a value provided as an argument is invalid"""

    def __init__(self, *args):
        self.arg_name = args[0]
        self.value = args[1]
        self.possibles = args[2]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("INVALID_ARGUMENT: Argument Name: %s, Provided Value: '%s', Possible Options: %s" % (self.arg_name, self.value, self.possibles))  # noqa: E501


class UnsupportedDistribution(Exception):
    """Raised when a delay law has no closed form for a quantity"""

    def __init__(self, *args):
        self.kind = args[0]
        self.quantity = args[1]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("UNSUPPORTED_DISTRIBUTION: no closed form %s for '%s'" % (self.quantity, self.kind))  # noqa: E501


class InconsistentBounds(Exception):
    """Raised when the threshold bounds are inverted"""

    def __init__(self, *args):
        self.gamma_lb = args[0]
        self.gamma_ub = args[1]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("INCONSISTENT_BOUNDS: gamma_lb %s > gamma_ub %s" % (self.gamma_lb, self.gamma_ub))  # noqa: E501


class NoSignChange(Exception):
    """Raised when a root bracket cannot be formed"""

    def __init__(self, *args):
        self.point = args[0]
        self.value = args[1]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("NO_SIGN_CHANGE: h(%s) = %s" % (self.point, self.value))


class InfeasibleConstraint(Exception):
    """Raised when the frequency constraint cannot be met"""

    def __init__(self, *args):
        self.f_max = args[0]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("INFEASIBLE_CONSTRAINT: f_max = %s" % self.f_max)


class DegenerateFit(Exception):
    """Raised when a regression has nothing to fit"""

    def __init__(self, *args):
        self.value = args[0]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("DEGENERATE_FIT: %s" % self.value)


class UnpairedSeeds(Exception):
    """Raised when two ensembles do not share their seeds"""

    def __init__(self, *args):
        self.missing = args[0]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("UNPAIRED_SEEDS: no counterpart for %s" % self.missing)


class MixedChannel(Exception):
    """Raised when runs over different channels are aggregated"""

    def __init__(self, *args):
        self.ids = args[0]
        Exception.__init__(self, *args)

    def __str__(self):
        return repr("MIXED_CHANNEL: %s" % self.ids)

# Exception Decorator


def log_exceptions(func):
    def decorated(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception as e:
            log.error('%s: %s: %s', func.__name__,
                      e.__class__.__name__, str(e))
            raise
    decorated.__name__ = func.__name__
    decorated.__doc__ = func.__doc__
    return decorated
#############################


def is_inf(value):
    return value is None or math.isinf(value)


def to_bool(value):
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ['true', 'yes', '1']


def positive_part(value):
    return value if value > 0 else 0.0
