# regex.py - Centralized regex patterns for the config, checkpoint and CLI formats
import re


class RegexPatterns:
    """Centralized regex patterns for the text formats NbLink reads"""

    def __init__(self):
        self.patterns = {
            'comment': re.compile(r'^\s*(#.*)?$'),
            'config_line': re.compile(r'^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*(?:#.*)?$'),
            'ckpt_version': re.compile(r'^SMARTCON-CKPT v(\d+)$'),
            'ckpt_dims': re.compile(r'^H=(\d+) mu=(\S+) beta=(\S+)$'),
            'tensor_header': re.compile(r'^([A-Za-z_][A-Za-z0-9_]*) (\d+) (\d+)$'),
            'ue_range': re.compile(r'^(\d+)\.\.(\d+)(?::(\d+))?$'),
            'int_list': re.compile(r'^\s*-?\d+(\s*,\s*-?\d+)*\s*$'),
        }

    def get(self, pattern_name):
        """Get a compiled regex pattern by name"""
        return self.patterns.get(pattern_name)

    def match(self, pattern_name, text):
        """Match text against a named pattern"""
        pattern = self.get(pattern_name)
        if not pattern:
            return None
        return pattern.search(text)

    def extract(self, pattern_name, text, group=1):
        """Extract a specific group from a pattern match"""
        match = self.match(pattern_name, text)
        if match and group <= len(match.groups()):
            return match.group(group)
        return None

    def contains(self, pattern_name, text):
        """Check if text contains a match for the pattern"""
        return self.match(pattern_name, text) is not None
