__doc__ = """
Sqlite store of finished sweep cells, so an interrupted or repeated sweep only
runs the cells it has not seen. Keys are cell fingerprints (every parameter of
the run plus x and seed); values are the cell summaries, pickled then zlib compressed.
"""

import os
import datetime
import sqlite3
import zlib
import pickle

DEFAULT_TIMEOUT = 10000


class RunCache:
    """Dict-like access to finished cell summaries

    filename:
        the sqlite database, ':memory:' keeps it in process
    compress_level:
        zlib level 1-9
    timeout:
        milliseconds to wait for a locked database

    >>> cache = RunCache(':memory:')
    >>> key = 'strategy=KS;x=0.75;seed=1'
    >>> key in cache
    False
    >>> cache[key] = {'tail_mean': 0.9, 'final_fraction': 1.0, 'status': 'ok'}
    >>> key in cache, len(cache)
    (True, 1)
    >>> cache[key]['tail_mean']
    0.9
    >>> del cache[key]
    >>> cache.get(key, 'missing')
    'missing'
    """
    def __init__(self, filename=':memory:', compress_level=6, timeout=DEFAULT_TIMEOUT):
        self.filename = filename
        self.compress_level = compress_level
        if filename != ':memory:':
            os.makedirs(os.path.dirname(os.path.abspath(filename)), exist_ok=True)
        self.conn = sqlite3.connect(filename, timeout=timeout / 1000.0, isolation_level=None)
        self.conn.execute("""
        CREATE TABLE IF NOT EXISTS cells (
            key TEXT NOT NULL PRIMARY KEY,
            summary BLOB,
            updated TEXT
        );
        """)

    def __contains__(self, key):
        return self.conn.execute("SELECT 1 FROM cells WHERE key=?;", (key,)).fetchone() is not None

    def __iter__(self):
        """Cell keys in sorted order
        """
        for (key,) in self.conn.execute("SELECT key FROM cells ORDER BY key;").fetchall():
            yield key

    def __bool__(self):
        # an empty cache is still a cache
        return True

    def __len__(self):
        return self.conn.execute("SELECT count(*) FROM cells;").fetchone()[0]

    def __getitem__(self, key):
        row = self.conn.execute("SELECT summary FROM cells WHERE key=?;", (key,)).fetchone()
        if row is None:
            raise KeyError('no cached cell {}'.format(key))
        return self.deserialize(row[0])

    def __delitem__(self, key):
        self.conn.execute("DELETE FROM cells WHERE key=?;", (key,))

    def __setitem__(self, key, summary):
        self.conn.execute("INSERT OR REPLACE INTO cells (key, summary, updated) VALUES (?, ?, ?);",
                          (key, self.serialize(summary), datetime.datetime.now().isoformat(timespec='seconds')))

    def serialize(self, summary):
        return sqlite3.Binary(zlib.compress(pickle.dumps(summary, protocol=pickle.HIGHEST_PROTOCOL),
                                            self.compress_level))

    def deserialize(self, blob):
        return pickle.loads(zlib.decompress(blob)) if blob else None

    def get(self, key, default=None):
        try:
            return self[key]
        except KeyError:
            return default

    def clear(self):
        self.conn.execute("DELETE FROM cells;")

    def close(self):
        self.conn.close()
