"""
Модуль конфигурации для nck3
"""

import yaml
import logging
from pathlib import Path
from typing import Dict, Any, Optional


class Config:
    """Класс для загрузки и управления конфигурацией приложения"""

    def __init__(self, config_path: Optional[str] = None, data: Optional[Dict[str, Any]] = None):
        """
        Инициализация конфигурации

        Args:
            config_path: Путь к файлу конфигурации YAML
            data: Готовый словарь (вместо файла)
        """
        self.config_path = Path(config_path) if config_path else None
        self.logger = logging.getLogger(__name__)
        self._config = dict(data) if data is not None else self._load_config()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """Конфигурация без файла (тесты, воркеры пакетной обработки)"""
        return cls(data=data)

    def to_dict(self) -> Dict[str, Any]:
        return dict(self._config)

    def _load_config(self) -> Dict[str, Any]:
        """
        Загружает конфигурацию из YAML файла

        Returns:
            Словарь с конфигурацией
        """
        try:
            if self.config_path is None or not self.config_path.exists():
                raise FileNotFoundError(
                    f"Файл конфигурации не найден: {self.config_path}"
                )

            with open(self.config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f) or {}

            self.logger.info(f"Конфигурация загружена из {self.config_path}")
            return config

        except Exception as e:
            self.logger.error(f"Ошибка загрузки конфигурации: {e}")
            raise

    def __getitem__(self, key: str) -> Any:
        """Доступ к параметрам конфигурации через индексы"""
        return self._config[key]

    def get(self, key: str, default: Any = None) -> Any:
        """
        Получение значения конфигурации с возможностью задать default

        Args:
            key: Ключ конфигурации
            default: Значение по умолчанию

        Returns:
            Значение конфигурации или default
        """
        return self._config.get(key, default)

    def set_section_value(self, section: str, key: str, value: Any) -> None:
        """Переопределение одного значения (флаги командной строки)"""
        self._config.setdefault(section, {})[key] = value

    @property
    def app(self) -> Dict[str, Any]:
        """Конфигурация приложения"""
        return self._config.get("app", {})

    @property
    def counting(self) -> Dict[str, Any]:
        """Подсчёт точек: воркеры, предел q^n"""
        return self._config.get("counting", {})

    @property
    def fields(self) -> Dict[str, Any]:
        """Конечные поля"""
        return self._config.get("fields", {})

    @property
    def weil(self) -> Dict[str, Any]:
        """Многочлены Вейля"""
        return self._config.get("weil", {})

    @property
    def filters(self) -> Dict[str, Any]:
        """Диапазоны проверки условий"""
        return self._config.get("filters", {})

    @property
    def batch(self) -> Dict[str, Any]:
        """Пакетная обработка"""
        return self._config.get("batch", {})

    @property
    def performance(self) -> Dict[str, Any]:
        """Конфигурация производительности"""
        return self._config.get("performance", {})

    @property
    def debug(self) -> Dict[str, Any]:
        """Конфигурация отладки"""
        return self._config.get("debug", {})
