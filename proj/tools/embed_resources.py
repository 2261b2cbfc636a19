#!/usr/bin/env python3
"""Regenerate include/steer/resources.hpp from the files in resources/."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
files = {
    "kPosLexicon": "pos_lexicon.tsv",
    "kSyllableExceptions": "syllable_exceptions.tsv",
    "kBoilerplatePatterns": "boilerplate_patterns.txt",
    "kUnderspecifiedPhrases": "underspecified_phrases.txt",
    "kInstructions": "instructions.tsv",
}
out = [
    "#pragma once",
    "",
    "// Generated by tools/embed_resources.py from resources/. Do not edit.",
    "",
    "#include <string_view>",
    "",
    "namespace steer::resources {",
    "",
]
for name, fname in files.items():
    body = (root / "resources" / fname).read_text()
    assert ')steer"' not in body
    out.append(f"// {fname}")
    out.append(f'inline constexpr std::string_view {name} = R"steer({body})steer";')
    out.append("")
out.append("}  // namespace steer::resources")
(root / "include" / "steer" / "resources.hpp").write_text("\n".join(out) + "\n")
