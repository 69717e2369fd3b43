import json
import os
from functools import lru_cache

from config import Config


LANGUAGE_DIR = os.path.join(os.path.dirname(__file__), "language")


@lru_cache(maxsize=None)
def _load_language_file(base_path, lang):
    with open(os.path.join(base_path, f"{lang}.json"), "r", encoding="utf-8") as f:
        return json.load(f)


class Messages:
    def __init__(self, default_lang=Config.BASE_LANGUAGE, base_path=LANGUAGE_DIR):
        """
        Catalog of diagnostic and log strings.

        :param default_lang: The language code used when the requested one is missing.
        :param base_path: Directory holding the ``<lang>.json`` files.
        """
        self.default_lang = default_lang
        self.base_path = base_path

    def __load(self, lang):
        try:
            return _load_language_file(self.base_path, lang)
        except FileNotFoundError:
            return _load_language_file(self.base_path, self.default_lang)

    def get(self, file, key, *args, lang=None, **kwargs):
        """
        Retrieve and format a message by its section and key.

        :param file: The section of the catalog (e.g. "cli").
        :param key: The key within the section, case-insensitive.
        :param args: Positional arguments for string formatting.
        :param kwargs: Keyword arguments for string formatting.
        :return: The formatted message string.
        """
        messages = self.__load(lang or self.default_lang)

        try:
            message = messages[file][key.lower()]
        except KeyError:
            message = self.__load(self.default_lang)[file][key.lower()]

        return message.format(*args, **kwargs)


messages = Messages()
