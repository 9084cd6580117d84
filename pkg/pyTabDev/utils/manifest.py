"""Run manifests recording how an output directory was produced"""

from __future__ import absolute_import

from collections import namedtuple
import datetime
import hashlib
import json
import logging

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def canonical_json(document):
    """JSON text independent of key insertion order"""
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def config_hash(config):
    """sha256 hex digest of the canonical JSON form of config"""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


class RunManifest(namedtuple("RunManifest",
                             ["command", "config_hash", "seed", "version",
                              "timestamp", "outputs"])):
    """Provenance of one command invocation.

    ``command`` echoes the argument vector, ``outputs`` lists the files the
    run wrote and ``seed`` is the master seed (None for deterministic
    commands).
    """

    __slots__ = ()

    @classmethod
    def create(cls, command, config, seed, outputs):
        from .. import __version__
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return cls(list(command), config_hash(config), seed, __version__,
                   timestamp, sorted(outputs))

    def as_dict(self):
        document = dict(self._asdict())
        document["schema"] = SCHEMA_VERSION
        return document

    def write(self, path):
        logger.info("Writing run manifest to %s", path)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.as_dict(), f, indent=2, sort_keys=True)
            f.write("\n")


__all__ = ["SCHEMA_VERSION", "canonical_json", "config_hash", "RunManifest"]
