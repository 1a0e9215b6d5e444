"""Text prompts and panorama descriptor augmentation."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError, PromptTooLongError

MAX_PROMPT_CHARS = 2000

DEFAULT_DESCRIPTORS = (
    "360 degree equirectangular panorama",
    "seamless horizontal wrap",
    "wide field of view",
)


@dataclass(frozen=True)
class TextPrompt:
    """Trimmed UTF-8 prompt text, 1-2000 characters."""

    text: str

    def __post_init__(self):
        if not isinstance(self.text, str):
            raise InvalidInputError("prompt text must be a string")
        trimmed = self.text.strip()
        if not trimmed:
            raise InvalidInputError("prompt text is empty")
        if len(trimmed) > MAX_PROMPT_CHARS:
            raise PromptTooLongError(f"prompt has {len(trimmed)} chars, limit {MAX_PROMPT_CHARS}")
        object.__setattr__(self, "text", trimmed)


@dataclass(frozen=True)
class RefinedPrompt:
    """Base prompt plus the panorama descriptors appended to it."""

    base: TextPrompt
    descriptors: tuple
    rendered: str

    def __post_init__(self):
        descriptors = tuple(self.descriptors)
        if len(set(descriptors)) != len(descriptors):
            raise InvalidInputError("descriptors must be duplicate-free")
        expected = _render(self.base.text, descriptors)
        if self.rendered != expected:
            raise InvalidInputError("rendered text does not match base + descriptors")
        object.__setattr__(self, "descriptors", descriptors)


def _render(base_text: str, descriptors) -> str:
    if not descriptors:
        return base_text
    return base_text + ", " + ", ".join(descriptors)


def refine_prompt(raw, descriptors=DEFAULT_DESCRIPTORS) -> RefinedPrompt:
    """Append descriptors the prompt does not already mention (case-insensitive).

    Idempotent: refining a rendered prompt again adds nothing.
    """
    base = raw if isinstance(raw, TextPrompt) else TextPrompt(raw)
    lowered = base.text.lower()
    kept = tuple(d for d in descriptors if d.lower() not in lowered)
    rendered = _render(base.text, kept)
    if len(rendered) > MAX_PROMPT_CHARS:
        raise PromptTooLongError(f"refined prompt has {len(rendered)} chars, limit {MAX_PROMPT_CHARS}")
    return RefinedPrompt(base=base, descriptors=kept, rendered=rendered)


def parse_rendered(rendered: str, descriptors=DEFAULT_DESCRIPTORS):
    """Split a rendered prompt back into (base_text, appended descriptors).

    Descriptors are appended in vocabulary order, so they can be stripped from
    the end in reverse order.
    """
    text = rendered
    found = []
    for d in reversed(descriptors):
        suffix = ", " + d
        if text.endswith(suffix):
            text = text[: -len(suffix)]
            found.append(d)
    return text, tuple(reversed(found))
