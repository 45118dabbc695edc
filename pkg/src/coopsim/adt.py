__doc__ = 'High level abstract datatypes'


class Bag(dict):
    """Dictionary object with attribute like access

    >>> b = Bag(strategy='KS')
    >>> b.population = 60
    >>> b.population
    60
    >>> b.icpc
    """
    def __init__(self, *args, **kwargs):
        dict.__init__(self, *args, **kwargs)

    def __getattr__(self, name):
        return self.get(name)

    def __setattr__(self, name, value):
        self[name] = value

    def fingerprint(self):
        """Stable text form of the items, independent of insertion order

        >>> Bag(x=0.5, b=4).fingerprint() == Bag(b=4, x=0.5).fingerprint()
        True
        >>> Bag(x=0.5, b=4).fingerprint()
        'b=4;x=0.5'
        """
        return ';'.join('{}={!r}'.format(key, self[key]) for key in sorted(self))
