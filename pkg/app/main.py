import logging
import sys
from typing import List, Optional

from app.cli import build_parser
from app.config import settings
from app.exceptions import IcsFuzzError
from app.models import ExitStatus

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logger.debug(f"{settings.app_name} v{settings.app_version}: {args.command}")
        return int(args.handler(args))
    except IcsFuzzError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return int(e.exit_status)
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return int(ExitStatus.IO_ERROR)
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return int(ExitStatus.INTERNAL_ERROR)


if __name__ == "__main__":
    sys.exit(main())
