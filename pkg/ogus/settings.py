"""
Package-wide defaults for the randomized parts of the library.

Each default can be overridden from the environment, which is how the
command-line front end exposes them to scripts.
"""
import hashlib
import logging
import os

log = logging.getLogger(__name__)

SEED_ENV_VAR = 'OGUS_SEED'
SAMPLES_ENV_VAR = 'OGUS_SAMPLES'

# Stable subspaces sampled per place before a verdict is left undetermined.
FALSIFICATION_SAMPLES = 500

# Above this many eigenlines the exact subset enumeration is not attempted.
EIGENSPAN_LIMIT = 12


def _int_from_env(name):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return None
    try:
        return int(raw)
    except ValueError:
        log.warning('Ignoring non-integer %s=%r', name, raw)
        return None


def digest_seed(payload):
    """
    Derive a seed from the SHA-256 digest of `payload` (a str or bytes).
    """
    if isinstance(payload, str):
        payload = payload.encode('utf-8')
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], 'big')


def default_seed(payload):
    """
    The seed used when the caller does not pass one.

    `OGUS_SEED` wins when set; otherwise the seed is derived from `payload`,
    normally the canonical serialization of the object being checked.
    """
    seed = _int_from_env(SEED_ENV_VAR)
    if seed is not None:
        return seed
    return digest_seed(payload)


def default_samples():
    """
    Number of falsification samples per place.
    """
    samples = _int_from_env(SAMPLES_ENV_VAR)
    if samples is not None and samples >= 0:
        return samples
    return FALSIFICATION_SAMPLES
