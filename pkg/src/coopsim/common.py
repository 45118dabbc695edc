__doc__ = 'Common errors, logging and CSV output shared by the simulator'

import os
import sys
import csv
import logging
import logging.handlers
from . import settings


class CoopSimError(Exception):
    pass


class InvalidParameter(CoopSimError, ValueError):
    """A parameter outside its allowed range

    >>> str(InvalidParameter('w', 'must be below 1'))
    'w: must be below 1'
    """
    def __init__(self, field, problem):
        self.field = field
        self.problem = problem
        CoopSimError.__init__(self, '{}: {}'.format(field, problem))


class UnreachableThreshold(CoopSimError):
    """The condition would need a probability above 1
    """
    def __init__(self, condition, value):
        self.condition = condition
        self.value = value
        CoopSimError.__init__(self, '{} threshold unreachable: x={:.6g} > 1'.format(condition, value))


class ConfigError(CoopSimError):
    """Config file problem, located by key and line number

    >>> str(ConfigError('run.cfg', 'game', 'x', 'w=1 divides by zero', lineno=4))
    'run.cfg:4: [game] x: w=1 divides by zero'
    """
    def __init__(self, path, section, key, problem, lineno=None):
        self.path, self.section, self.key, self.lineno = path, section, key, lineno
        where = '{}:{}'.format(path, lineno) if lineno else path
        name = '[{}] {}'.format(section, key) if key else '[{}]'.format(section)
        CoopSimError.__init__(self, '{}: {}: {}'.format(where, name, problem))


class SimulationError(CoopSimError):
    pass


def format_number(value, spec=settings.float_format):
    """Fixed text form for CSV cells so identical runs give identical bytes

    >>> format_number(0.1)
    '0.10000000000000001'
    >>> format_number(3)
    '3'
    >>> format_number(True)
    'true'
    >>> format_number(None)
    ''
    """
    if value is None:
        return ''
    elif isinstance(value, bool):
        return 'true' if value else 'false'
    elif isinstance(value, int):
        return str(value)
    elif isinstance(value, float):
        return format(value, spec)
    return str(value)


class ResultWriter:
    """A CSV writer for simulation results with fixed numeric formatting

    file:
        can either be a filename or a file object
    mode:
        the mode for writing to file
    unique:
        if True then will only write unique rows to output

    >>> from io import StringIO
    >>> fp = StringIO()
    >>> writer = ResultWriter(fp)
    >>> writer.writerow(['tick', 'cooperator_fraction'])
    >>> writer.writerow([1, 0.5])
    >>> writer.comment('tail_mean=0.5')
    >>> fp.getvalue()
    'tick,cooperator_fraction\\n1,0.5\\n# tail_mean=0.5\\n'
    """
    def __init__(self, file, mode='w', unique=False, quoting=csv.QUOTE_MINIMAL, **argv):
        self.unique = unique
        self.seen = set()
        if hasattr(file, 'write'):
            self.fp = file
            self.owned = False
        else:
            self.fp = open(file, mode, newline='', encoding='utf-8')
            self.owned = True
        self.writer = csv.writer(self.fp, quoting=quoting, lineterminator='\n', **argv)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def writerow(self, row):
        """Write row to output
        """
        row = tuple(format_number(col) for col in row)
        if self.unique:
            if row in self.seen:
                return
            self.seen.add(row)
        self.writer.writerow(row)

    def writerows(self, rows):
        """Write multiple rows to output
        """
        for row in rows:
            self.writerow(row)

    def comment(self, text):
        """Write a '#' line, skipped by most CSV readers given a comment prefix
        """
        self.fp.write('# {}\n'.format(text))

    def close(self):
        """Close the output file pointer if opened here
        """
        if self.owned:
            self.fp.close()
        else:
            self.fp.flush()


class ConsoleHandler(logging.StreamHandler):
    """Log to stderr for errors else stdout
    """
    def __init__(self):
        logging.StreamHandler.__init__(self)
        self.stream = None

    def emit(self, record):
        if record.levelno >= logging.ERROR:
            self.stream = sys.stderr
        else:
            self.stream = sys.stdout
        logging.StreamHandler.emit(self, record)


def get_logger(output_file=None, level=settings.log_level, maxbytes=0, name='coopsim'):
    """Create a logger instance

    output_file:
        optional file where to save the log
    level:
        the minimum logging level shown on the console
    maxbytes:
        the maxbytes allowed for the log file size. 0 means no limit.
    """
    logger = logging.getLogger(name)
    # avoid duplicate handlers
    if not logger.handlers:
        logger.setLevel(logging.DEBUG)
        console_handler = ConsoleHandler()
        console_handler.setLevel(level)
        logger.addHandler(console_handler)
    if output_file:
        add_file_handler(logger, output_file, maxbytes)
    return logger


def add_file_handler(logger, output_file, maxbytes=0):
    """Attach a file handler unless one already writes to this file
    """
    path = os.path.abspath(output_file)
    for handler in logger.handlers:
        if getattr(handler, 'baseFilename', None) == path:
            return
    try:
        directory = os.path.dirname(path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
        if not maxbytes:
            file_handler = logging.FileHandler(path)
        else:
            file_handler = logging.handlers.RotatingFileHandler(path, maxBytes=maxbytes)
    except (IOError, OSError):
        logger.warning('Unable to write log file: %s', path)
    else:
        file_handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(message)s'))
        logger.addHandler(file_handler)


def set_console_level(logger, level):
    for handler in logger.handlers:
        if isinstance(handler, ConsoleHandler):
            handler.setLevel(level)

logger = get_logger(settings.log_file, maxbytes=64*1024*1024)
