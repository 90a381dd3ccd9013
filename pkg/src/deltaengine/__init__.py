"""deltaengine: a role engine whose state is code.

A role starts as rule-generated code and grows turn-by-turn: a natural
language instruction is turned into an increment (a block of methods to
add or overload) which is merged onto the current code. Battles between
roles execute that code in a budgeted interpreter. Around the core sit an
evaluation harness, a data-generation pipeline, an HTTP service and a CLI.
"""

__version__ = "0.1.0"
