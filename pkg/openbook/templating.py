from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined, TemplateNotFound

from .exceptions import TemplateException
from .logger import get_logger

TEMPLATE_DIR = Path(__file__).parent / "templates"


class Templating:
    """Plain-text rendering of reports and tables using Jinja2."""

    def __init__(self, directory: str | Path = TEMPLATE_DIR):
        """
        Initialize the templating engine.

        Args:
            directory: Directory containing template files
        """
        self.directory = Path(directory)
        self.env = Environment(
            loader=FileSystemLoader(str(self.directory)),
            autoescape=False,
            undefined=StrictUndefined,
            keep_trailing_newline=True,
            trim_blocks=True,
            lstrip_blocks=True,
        )
        self._setup_environment()

    def _setup_environment(self):
        self.env.filters["sci"] = self._sci_filter
        self.env.filters["status"] = self._status_filter

    def _sci_filter(self, value: float, digits: int = 3) -> str:
        """Format a number in scientific notation, e.g. 1.234e-09."""
        return f"{value:.{digits}e}"

    def _status_filter(self, passed: bool) -> str:
        return "PASS" if passed else "FAIL"

    def render(self, template_name: str, **context) -> str:
        """
        Render a template with the given context.

        Raises:
            TemplateNotFound: If the template file doesn't exist
            TemplateException: If rendering fails
        """
        try:
            template = self.env.get_template(template_name)
            return template.render(**context)
        except TemplateNotFound:
            raise TemplateNotFound(
                f"Template '{template_name}' not found in directory '{self.directory}'"
            ) from None
        except Exception as e:
            logger = get_logger("openbook")
            logger.error(f"Error rendering template '{template_name}': {str(e)}")
            raise TemplateException(
                f"Could not render template: {e}", template_name
            ) from None


def render_text(reports) -> str:
    """The fixed-width text table for a list of CheckReports."""
    width = max((len(c.name) for r in reports for c in r.checks), default=4)
    return Templating().render("report.txt.j2", reports=reports, width=max(width, 5))
