# ENTBOUND Version Manager
import json
import logging
import os
import re
from datetime import date
from typing import Any, Dict, List, Optional, Tuple

from errors import PreconditionError

logger = logging.getLogger(__name__)

DEFAULT_VERSION = "0.1.0-dev"
BUMP_TYPES = ("major", "minor", "patch")
_VERSION_RE = re.compile(r"^v?(\d+)\.(\d+)\.(\d+)(?:-[0-9A-Za-z.]+)?$")


def parse_version(text: str) -> Tuple[int, int, int]:
    match = _VERSION_RE.match(text.strip())
    if match is None:
        raise PreconditionError(f"not a semantic version: {text!r}")
    return tuple(int(part) for part in match.groups())


class VersionManager:
    """Release metadata kept in version.json next to the toolkit modules"""

    def __init__(self, project_root: Optional[str] = None):
        self.project_root = project_root or os.path.dirname(os.path.abspath(__file__))
        self.version_file = os.path.join(self.project_root, "version.json")

    def get_version_info(self) -> Dict[str, Any]:
        """Full contents of version.json (empty dict when missing or unreadable)"""
        try:
            with open(self.version_file, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            logger.debug(f"No usable version file at {self.version_file}: {e}")
            return {}
        return data if isinstance(data, dict) else {}

    def get_current_version(self) -> str:
        return self.get_version_info().get("version", DEFAULT_VERSION)

    def banner(self) -> str:
        info = self.get_version_info()
        return f"{info.get('platform', 'ENTBOUND')} {info.get('version', DEFAULT_VERSION)} ({info.get('status', 'dev')})"

    def bump_version(self, bump_type: str, changes: Optional[List[str]] = None) -> str:
        """Bump major/minor/patch, keep the feature table, record the changes"""
        if bump_type not in BUMP_TYPES:
            raise PreconditionError(f"bump type must be one of {', '.join(BUMP_TYPES)}, got {bump_type!r}")
        current = self.get_current_version()
        major, minor, patch = parse_version(current)
        if bump_type == "major":
            major, minor, patch = major + 1, 0, 0
        elif bump_type == "minor":
            minor, patch = minor + 1, 0
        else:
            patch += 1
        new_version = f"{major}.{minor}.{patch}"

        data = self.get_version_info()
        data.update({
            "version": new_version,
            "previous_version": current,
            "status": "release",
            "completion_date": date.today().isoformat(),
            "changes": list(changes or []),
        })
        with open(self.version_file, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=4, ensure_ascii=False)
            f.write("\n")
        logger.info(f"✅ Version bumped {current} -> {new_version}")
        return new_version
