#!/usr/bin/python3

"""Loading and validating experiment config files.

A config is a single JSON document, e.g.

    {
        "name": "lognormal-constrained",
        "channel": {"alpha": 0.1,
                    "fwd": {"kind": "lognormal", "mu": 1, "sigma": 1.8},
                    "bwd": {"kind": "lognormal", "mu": 1, "sigma": 1.8}},
        "policy": "online",
        "horizon_epochs": 100000,
        "f_max_delay_multiple": 5,
        "V": 50,
        "seed": 1,
        "learner": {"priors": null, "momentum_a": 0.005},
        "ensemble": {"n_seeds": 20, "checkpoints": [100, 1000, 10000]}
    }

Top-level keys and their types are checked against configs/schema.json.
"""

import json
import os

import jsonschema

from agesampler import utils
from agesampler import channel
from agesampler import policy
from agesampler import learner
from agesampler import oracle
from agesampler import simulator
from agesampler import ensemble

SCHEMA_FILE = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), 'configs', 'schema.json')

OVERRIDABLE = ['name', 'policy', 'horizon_epochs', 'f_max',
               'f_max_delay_multiple', 'V', 'seed', 'trace_stride',
               'include_warmup']


class ExperimentConfig(object):
    """A parsed config file: the base run and the optional ensemble."""

    def __init__(self, name, run_config, ensemble_spec, raw):
        self.name = name
        self.run_config = run_config
        self.ensemble_spec = ensemble_spec
        self.raw = raw

    def get_name(self):
        return self.name

    def get_run_config(self):
        return self.run_config

    def get_ensemble_spec(self):
        if self.ensemble_spec is None:
            raise utils.ArgumentError("Config '%s' has no ensemble section"
                                      % self.name)
        return self.ensemble_spec


def assert_file_exists(file_name, label):
    """Check whether a file exists, if it doesn't, raise an exception"""
    if not os.path.isfile(file_name):
        raise utils.ConfigFileNotFound(file_name, label)


def load_schema(path=SCHEMA_FILE):
    assert_file_exists(path, 'Config schema')
    with open(path) as fh:
        return json.load(fh)


def check_schema(rec, schema, section='config'):
    try:
        jsonschema.validate(instance=rec, schema=schema)
    except jsonschema.ValidationError as e:
        key = ".".join([section] + [str(part) for part in e.absolute_path])
        raise utils.InvalidArgument(key, e.instance, e.message)


def kvp_string_to_rec(string):
    """Take an input string 'a=b,c=d,e=f' and return the record
    {'a':'b','c':'d','e':'f'}"""
    rec = {}
    for kvp in string.split(','):
        arr = kvp.split('=')
        if len(arr) != 2:
            raise utils.InvalidArgument('option', kvp, 'key=value')
        rec[arr[0].strip()] = arr[1].strip()
    return rec


def apply_overrides(rec, overrides):
    """Override top-level scalar keys; values are read as JSON where
    possible and kept as strings otherwise."""
    for key, value in overrides.items():
        if key not in OVERRIDABLE:
            raise utils.InvalidArgument('override key', key, OVERRIDABLE)
        try:
            value = json.loads(value)
        except ValueError:
            pass
        utils.log.debug("Override %s = '%s'" % (key, value))
        rec[key] = value
        if key == 'f_max':
            rec.pop('f_max_delay_multiple', None)
        elif key == 'f_max_delay_multiple':
            rec.pop('f_max', None)
    return rec


def _number(section, key, value, cast=float, minimum=None, strict=False):
    try:
        if isinstance(value, bool):
            raise ValueError(value)
        number = cast(value)
    except (TypeError, ValueError):
        raise utils.InvalidArgument('%s.%s' % (section, key), value,
                                    'should be %s' % cast.__name__)
    if cast is int and number != value:
        raise utils.InvalidArgument('%s.%s' % (section, key), value,
                                    'should be int')
    if minimum is not None:
        if (strict and not number > minimum) or number < minimum:
            raise utils.InvalidArgument('%s.%s' % (section, key), value,
                                        'x %s %s' % ('>' if strict else '>=',
                                                     minimum))
    utils.log.debug("Get option %s.%s = '%s'" % (section, key, number))
    return number


def parse_section_delay(rec, section):
    if not isinstance(rec, dict) or 'kind' not in rec:
        raise utils.InvalidArgument(section, rec, 'object with a kind')
    kind = rec['kind']
    if kind not in channel.KIND_PARAMS:
        raise utils.InvalidArgument('%s.kind' % section, kind,
                                    list(channel.KIND_PARAMS.keys()))
    known = channel.KIND_PARAMS[kind] + ['kind', 'epsilon', 'upper',
                                         'upper_quantile', 'truncation']
    for key in rec.keys():
        if key not in known:
            raise utils.InvalidArgument('%s key' % section, key, known)
    params = {}
    for name in channel.KIND_PARAMS[kind]:
        if name not in rec:
            raise utils.InvalidArgument('%s.%s' % (section, name), None,
                                        'required for %s' % kind)
        params[name] = _number(section, name, rec[name])
    kwargs = {'epsilon': _number(section, 'epsilon',
                                 rec.get('epsilon', utils.DEFAULT_EPSILON),
                                 minimum=0),
              'truncation': rec.get('truncation', utils.TRUNCATE_REJECT)}
    if rec.get('upper') is not None:
        kwargs['upper'] = _number(section, 'upper', rec['upper'])
    if rec.get('upper_quantile') is not None:
        kwargs['upper_quantile'] = _number(section, 'upper_quantile',
                                           rec['upper_quantile'])
    return channel.DelayDistribution(kind, params, **kwargs)


def parse_section_channel(rec):
    utils.log.debug("Channel section: %s" % rec)
    known = ['alpha', 'fwd', 'bwd', 'm_cap']
    if not isinstance(rec, dict):
        raise utils.InvalidArgument('channel', rec, 'JSON object')
    for key in rec.keys():
        if key not in known:
            raise utils.InvalidArgument('channel key', key, known)
    for key in ['alpha', 'fwd', 'bwd']:
        if key not in rec:
            raise utils.InvalidArgument('channel.%s' % key, None, 'required')
    alpha = _number('channel', 'alpha', rec['alpha'], minimum=0)
    m_cap = rec.get('m_cap', utils.DEFAULT_M_CAP)
    if m_cap is not None:
        m_cap = _number('channel', 'm_cap', m_cap, int, 1)
    fwd = parse_section_delay(rec['fwd'], 'channel.fwd')
    bwd = parse_section_delay(rec['bwd'], 'channel.bwd')
    return channel.ChannelParams(alpha, fwd, bwd, m_cap)


def parse_f_max(rec, params):
    if 'f_max' in rec and 'f_max_delay_multiple' in rec:
        raise utils.InvalidArgument('f_max', rec['f_max'],
                                    'not together with f_max_delay_multiple')
    if 'f_max_delay_multiple' in rec:
        multiple = _number('config', 'f_max_delay_multiple',
                           rec['f_max_delay_multiple'], minimum=0, strict=True)
        mean_delay = params.fwd.mean() + params.bwd.mean()
        return 1.0 / (multiple * mean_delay)
    value = rec.get('f_max')
    if value is None or (isinstance(value, str) and value.strip().lower() in
                         ['inf', 'infinity', 'none', 'null']):
        return utils.INF
    return _number('config', 'f_max', value, minimum=0, strict=True)


def parse_section_learner(rec):
    rec = rec or {}
    known = ['priors', 'prior_slack', 'gamma_cap', 'gamma0', 'momentum_a',
             'pilot_epochs']
    for key in rec.keys():
        if key not in known:
            raise utils.InvalidArgument('learner key', key, known)
    priors = rec.get('priors')
    if isinstance(priors, dict):
        priors = learner.MomentPriors.from_record(priors)
    elif priors not in [None, simulator.PRIORS_EXACT]:
        raise utils.InvalidArgument('learner.priors', priors,
                                    [None, simulator.PRIORS_EXACT, 'object'])
    out = {'priors': priors}
    if rec.get('gamma_cap') is not None:
        out['gamma_cap'] = _number('learner', 'gamma_cap', rec['gamma_cap'],
                                   minimum=0, strict=True)
    if rec.get('gamma0') is not None:
        out['gamma0'] = _number('learner', 'gamma0', rec['gamma0'], minimum=0)
    if 'momentum_a' in rec:
        out['momentum_a'] = _number('learner', 'momentum_a',
                                    rec['momentum_a'], minimum=0, strict=True)
    if 'pilot_epochs' in rec:
        out['pilot_epochs'] = _number('learner', 'pilot_epochs',
                                      rec['pilot_epochs'], int, 1)
    return out, rec.get('prior_slack', 0.0)


def parse_section_oracle(rec):
    rec = rec or {}
    known = ['n', 'tol', 'crn_seed', 'method']
    for key in rec.keys():
        if key not in known:
            raise utils.InvalidArgument('oracle key', key, known)
    out = {}
    if 'n' in rec:
        out['oracle_n'] = _number('oracle', 'n', rec['n'], int,
                                  utils.MIN_ORACLE_N)
    if 'tol' in rec:
        out['oracle_tol'] = _number('oracle', 'tol', rec['tol'], minimum=0,
                                    strict=True)
    if 'crn_seed' in rec:
        out['crn_seed'] = _number('oracle', 'crn_seed', rec['crn_seed'],
                                  int, 0)
    if 'method' in rec:
        if rec['method'] not in oracle.METHODS:
            raise utils.InvalidArgument('oracle.method', rec['method'],
                                        oracle.METHODS)
        out['oracle_method'] = rec['method']
    return out


def parse_section_ensemble(rec, run_config):
    known = ['n_seeds', 'checkpoints', 'comparisons']
    for key in rec.keys():
        if key not in known:
            raise utils.InvalidArgument('ensemble key', key, known)
    n_seeds = _number('ensemble', 'n_seeds', rec.get('n_seeds', 1), int, 1)
    checkpoints = rec.get('checkpoints') or [run_config.horizon_epochs]
    if not isinstance(checkpoints, list):
        raise utils.InvalidArgument('ensemble.checkpoints', checkpoints,
                                    'list of epoch indices')
    checkpoints = [_number('ensemble', 'checkpoints', k, int, 1)
                   for k in checkpoints]
    comparisons = []
    for item in rec.get('comparisons') or []:
        if isinstance(item, str):
            item = {'policy': item}
        if not isinstance(item, dict) or 'policy' not in item:
            raise utils.InvalidArgument('ensemble.comparisons', item,
                                        'policy string or object with policy')
        comparisons.append(ensemble.Variant.from_record(item))
    return ensemble.EnsembleSpec(run_config, n_seeds, checkpoints,
                                 comparisons)


def parse_config(rec, schema=None, source='config'):
    schema = schema or load_schema()
    check_schema(rec, schema, source)

    params = parse_section_channel(rec['channel'])
    learner_args, slack = parse_section_learner(rec.get('learner'))
    if learner_args['priors'] == simulator.PRIORS_EXACT and slack:
        learner_args['priors'] = learner.MomentPriors.from_channel(
            params, _number('learner', 'prior_slack', slack, minimum=0))

    kwargs = {'f_max': parse_f_max(rec, params)}
    kwargs.update(learner_args)
    kwargs.update(parse_section_oracle(rec.get('oracle')))
    if 'V' in rec:
        kwargs['V'] = _number('config', 'V', rec['V'], minimum=0, strict=True)
    if 'seed' in rec:
        kwargs['seed'] = _number('config', 'seed', rec['seed'], int, 0)
    if 'trace_stride' in rec:
        kwargs['trace_stride'] = _number('config', 'trace_stride',
                                         rec['trace_stride'], int, 1)
    if 'include_warmup' in rec:
        kwargs['include_warmup'] = utils.to_bool(rec['include_warmup'])

    policy.parse_policy_spec(rec['policy'])
    horizon = _number('config', 'horizon_epochs', rec['horizon_epochs'],
                      int, 1)
    run_config = simulator.RunConfig(params, rec['policy'], horizon, **kwargs)

    spec = None
    if rec.get('ensemble') is not None:
        spec = parse_section_ensemble(rec['ensemble'], run_config)

    name = rec.get('name') or source
    utils.log.info("Loaded config '%s': %s, policy %s, K=%d, f_max=%s"
                   % (name, params.describe(), rec['policy'], horizon,
                      run_config.f_max))
    return ExperimentConfig(name, run_config, spec, rec)


def load_config(path, overrides=None):
    assert_file_exists(path, 'Experiment config')
    utils.log.debug("Parse config file: %s" % path)
    with open(path) as fh:
        try:
            rec = json.load(fh)
        except ValueError as e:
            raise utils.InvalidArgument('config file', path,
                                        'valid JSON (%s)' % e)
    if overrides:
        rec = apply_overrides(rec, overrides)
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_config(rec, source=name)
