import os
import sys


def burp(filename, contents, mode='w', allow_stdout=True, expanduser=True, expandvars=True):
    """
    Write `contents` to `filename`; '-' writes to stdout when allowed.
    """
    if filename == '-':
        if not allow_stdout:
            raise ValueError('Writing to stdout is not allowed')
        sys.stdout.write(contents)
    else:
        if expanduser:
            filename = os.path.expanduser(filename)
        if expandvars:
            filename = os.path.expandvars(filename)

        with open(filename, mode) as fh:
            fh.write(contents)


def slurp(filename, mode='r'):
    with open(filename, mode) as fh:
        return fh.read()
