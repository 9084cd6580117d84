"""Rendering of human readable command output from jinja2 templates"""

from __future__ import absolute_import

import logging
import math

from jinja2 import Environment, PackageLoader

logger = logging.getLogger(__name__)

# Create the jinja2 template environment.
env = Environment(loader=PackageLoader('pyTabDev', 'templates'),
                  trim_blocks=True, lstrip_blocks=True,
                  keep_trailing_newline=True)


def _number(value, digits=6):
    """Format a float for tables; NaN renders as 'nan'"""
    if value is None:
        return "-"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return "{:.{}g}".format(value, digits)


def render_report(template_fname, **template_args):
    """Render templates/report/<template_fname> to a string"""
    template = env.get_template("report/{}".format(template_fname))
    return template.render(**template_args)


def write_report_template(template_fname, path, **template_args):
    """Load the specified template from templates/report and write it"""
    logger.info("Writing pyTabDev/templates/report/%s to %s", template_fname,
                path)
    with open(path, 'w', encoding="utf-8") as f:
        f.write(render_report(template_fname, **template_args))


env.filters['num'] = _number
env.filters['full'] = repr
env.globals.update(zip=zip, len=len)

__all__ = ["render_report", "write_report_template"]
