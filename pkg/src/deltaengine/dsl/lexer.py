"""Tokenizer for the role language. `#` comments run to end of line."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .ast import Diagnostic, Severity, Span
from .errors import ParseError

KEYWORDS = {
    "role", "increment", "let", "fn", "if", "else", "return",
    "true", "false", "and", "or", "not", "self", "foe", "battle",
}

# longest match first
PUNCT = [
    ("<=", "LE"), (">=", "GE"), ("==", "EQ"), ("!=", "NE"),
    ("<", "LT"), (">", "GT"), ("=", "ASSIGN"),
    ("+", "PLUS"), ("-", "MINUS"), ("*", "STAR"), ("/", "SLASH"), ("%", "PERCENT"),
    ("{", "LBRACE"), ("}", "RBRACE"), ("(", "LPAREN"), (")", "RPAREN"),
    (",", "COMMA"), (".", "DOT"),
]

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    type: str          # keyword name, punct name, IDENT, INT, DECIMAL, STRING, EOF
    value: str
    line: int
    col: int

    @property
    def span(self) -> Span:
        return (self.line, self.col, max(1, len(self.value)))


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def err(msg: str, length: int = 1) -> ParseError:
        return ParseError(Diagnostic(Severity.ERROR, (line, col, length), msg, "lex"))

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if _is_ident_start(ch):
            start = i
            startcol = col
            while i < n and _is_ident_char(text[i]):
                i += 1
                col += 1
            word = text[start:i]
            tokens.append(Token(word if word in KEYWORDS else "IDENT", word, line, startcol))
            continue
        if ch.isdigit():
            start = i
            startcol = col
            while i < n and text[i].isdigit():
                i += 1
                col += 1
            if i < n and text[i] == "." and i + 1 < n and text[i + 1].isdigit():
                i += 1
                col += 1
                while i < n and text[i].isdigit():
                    i += 1
                    col += 1
                tokens.append(Token("DECIMAL", text[start:i], line, startcol))
            else:
                tokens.append(Token("INT", text[start:i], line, startcol))
            continue
        if ch == '"':
            startcol = col
            i += 1
            col += 1
            chars: List[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise err("unterminated string literal")
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in _ESCAPES:
                        raise err("invalid escape sequence", 2)
                    chars.append(_ESCAPES[text[i + 1]])
                    i += 2
                    col += 2
                    continue
                chars.append(c)
                i += 1
                col += 1
            tokens.append(Token("STRING", "".join(chars), line, startcol))
            continue
        for lit, name in PUNCT:
            if text.startswith(lit, i):
                tokens.append(Token(name, lit, line, col))
                i += len(lit)
                col += len(lit)
                break
        else:
            raise err(f"unexpected character {ch!r}")

    tokens.append(Token("EOF", "", line, col))
    return tokens
