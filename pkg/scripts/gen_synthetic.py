#!/usr/bin/env python3
"""Generate the synthetic handwriting corpus under data/synthetic/.

Output layout:
    manifest.json           dataset manifest (55 programs, 16 training)
    gold/pNN.py             canonical transcriptions
    images/pNN.png          placeholder page scans (tiny seeded noise)
    fixtures/<sha256>.json  recorded OCR documents keyed by image digest
    expected_scores.json    per-program and aggregate scores for the five
                            shipped replay configs, computed here with a
                            BFS edit-distance oracle rather than the
                            library's own scorer

Line geometry is constructed so indentation reconstruction is unambiguous:
one indent step is 75 px at a 1000 px page width, horizontal jitter is at
most 4 px, and box heights stay in 26..32 px. The assertions in
check_geometry() spell out the margins that make both reconstruction
methods land on the intended levels; regeneration fails loudly if an edit
to this script ever violates them.

Deterministic for a fixed seed. The shipped output is committed, so this
only needs to run again when the recipe changes.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import sys
from pathlib import Path

from PIL import Image

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from oracles import levenshtein_bfs  # noqa: E402

SEED = 20250817
PAGE_WIDTH = 1000
LEFT_MARGIN = 40
INDENT_STEP = 75
X_JITTER = 4
LINE_PITCH = 34
INDENT_UNIT = "    "

UNINDENTED_CONFIGS = ("replay-none-none",)
TRUE_LEVEL_CONFIGS = (
    "replay-absolute-none",
    "replay-relative-none",
    "replay-relative-echo-simple",
    "replay-relative-echo-cot",
)

# Single-character visual confusions; never to or from whitespace, so a
# corrupted line keeps its length and stays non-blank.
CONFUSIONS = {
    "l": "1",
    "1": "l",
    "o": "0",
    "0": "o",
    "e": "c",
    "c": "e",
    "t": "f",
    "f": "t",
    "r": "n",
    "n": "r",
    "s": "5",
    "5": "s",
    "a": "o",
    "u": "v",
    "v": "u",
    "g": "9",
    "9": "g",
    "b": "6",
    "i": "j",
    "h": "b",
    ":": ";",
    ".": ",",
    ",": ".",
    "(": "[",
    ")": "]",
    "=": "-",
}


def shape_sum(rng):
    f = rng.choice(["total_up_to", "sum_up_to", "add_up_to"])
    acc = rng.choice(["total", "result"])
    n = rng.randint(6, 12)
    return [
        (f"def {f}(n):", 0),
        (f"{acc} = 0", 1),
        ("for i in range(1, n + 1):", 1),
        (f"{acc} = {acc} + i", 2),
        (f"return {acc}", 1),
        (f"print({f}({n}))", 0),
    ]


def shape_even(rng):
    f = rng.choice(["is_even", "check_even"])
    arg = rng.choice(["number", "value"])
    n = rng.choice([4, 7, 9, 12])
    return [
        (f"def {f}({arg}):", 0),
        (f"if {arg} % 2 == 0:", 1),
        ("return True", 2),
        ("else:", 1),
        ("return False", 2),
        (f"print({f}({n}))", 0),
    ]


def shape_max(rng):
    f = rng.choice(["find_max", "largest"])
    var = rng.choice(["v", "item", "x"])
    lst = rng.choice(["[3, 9, 4]", "[5, 1, 8, 2]", "[10, 4, 6, 1]"])
    return [
        (f"def {f}(values):", 0),
        ("best = values[0]", 1),
        (f"for {var} in values:", 1),
        (f"if {var} > best:", 2),
        (f"best = {var}", 3),
        ("return best", 1),
        (f"print({f}({lst}))", 0),
    ]


def shape_countdown(rng):
    start = rng.randint(3, 8)
    word = rng.choice(["done", "liftoff", "go"])
    return [
        (f"count = {start}", 0),
        ("while count > 0:", 0),
        ("print(count)", 1),
        ("count = count - 1", 1),
        (f"print('{word}')", 0),
    ]


def shape_grade(rng):
    f = rng.choice(["grade", "letter_for"])
    a, b = rng.choice([(90, 80), (85, 70), (92, 75)])
    n = rng.randint(60, 99)
    return [
        (f"def {f}(score):", 0),
        (f"if score >= {a}:", 1),
        ("return 'A'", 2),
        (f"elif score >= {b}:", 1),
        ("return 'B'", 2),
        ("else:", 1),
        ("return 'C'", 2),
        (f"print({f}({n}))", 0),
    ]


def shape_factorial(rng):
    f = rng.choice(["factorial", "fact"])
    n = rng.randint(4, 7)
    return [
        (f"def {f}(n):", 0),
        ("result = 1", 1),
        ("for i in range(2, n + 1):", 1),
        ("result = result * i", 2),
        ("return result", 1),
        (f"print({f}({n}))", 0),
    ]


def shape_vowels(rng):
    f = rng.choice(["count_vowels", "vowel_total"])
    word = rng.choice(["banana", "window", "guitar", "summer"])
    return [
        (f"def {f}(word):", 0),
        ("count = 0", 1),
        ("for letter in word:", 1),
        ("if letter in 'aeiou':", 2),
        ("count = count + 1", 3),
        ("return count", 1),
        (f"print({f}('{word}'))", 0),
    ]


def shape_fizz(rng):
    stop = rng.choice([16, 21])
    divisor, word = rng.choice([(3, "fizz"), (5, "buzz")])
    return [
        (f"for n in range(1, {stop}):", 0),
        (f"if n % {divisor} == 0:", 1),
        (f"print('{word}')", 2),
        ("else:", 1),
        ("print(n)", 2),
    ]


def shape_average(rng):
    f = rng.choice(["average", "mean_of"])
    lst = rng.choice(["[2, 4, 6]", "[1, 5, 9, 5]", "[8, 3, 7]"])
    return [
        (f"def {f}(numbers):", 0),
        ("total = 0", 1),
        ("for value in numbers:", 1),
        ("total = total + value", 2),
        ("return total / len(numbers)", 1),
        (f"print({f}({lst}))", 0),
    ]


def shape_reverse(rng):
    f = rng.choice(["reverse", "flip_text"])
    word = rng.choice(["hello", "stream", "pocket"])
    return [
        (f"def {f}(text):", 0),
        ("result = ''", 1),
        ("for ch in text:", 1),
        ("result = ch + result", 2),
        ("return result", 1),
        (f"print({f}('{word}'))", 0),
    ]


def shape_squares(rng):
    stop = rng.randint(4, 7)
    return [
        ("squares = []", 0),
        (f"for i in range({stop}):", 0),
        ("squares.append(i * i)", 1),
        ("print(squares)", 0),
    ]


SHAPES = [
    shape_sum,
    shape_even,
    shape_max,
    shape_countdown,
    shape_grade,
    shape_factorial,
    shape_vowels,
    shape_fizz,
    shape_average,
    shape_reverse,
    shape_squares,
]


def bugged_programs():
    """Programs transcribed with the student's logical error left in place,
    plus the annotation describing the minimal repair."""
    return {
        "p29": (
            [
                ("def is_odd(number):", 0),
                ("if number / 2 != 0:", 1),
                ("return True", 2),
                ("return False", 1),
                ("print(is_odd(9))", 0),
            ],
            {
                "description": "division used where the remainder test was intended",
                "buggy_snippet": "number / 2",
                "fixed_snippet": "number % 2",
                "category": "arithmetic",
            },
        ),
        "p45": (
            [
                ("def total_up_to(n):", 0),
                ("total = 0", 1),
                ("for i in range(1, n):", 1),
                ("total = total + i", 2),
                ("return total", 1),
                ("print(total_up_to(10))", 0),
            ],
            {
                "description": "loop stops one short of the last value",
                "buggy_snippet": "range(1, n)",
                "fixed_snippet": "range(1, n + 1)",
                "category": "fence_post",
            },
        ),
        "p46": (
            [
                ("count = 5", 0),
                ("while count >= 0:", 0),
                ("print(count)", 1),
                ("count = count - 1", 1),
                ("print('done')", 0),
            ],
            {
                "description": "countdown runs past one all the way to zero",
                "buggy_snippet": "while count >= 0:",
                "fixed_snippet": "while count > 0:",
                "category": "fence_post",
            },
        ),
        "p47": (
            [
                ("def show_items(items):", 0),
                ("for i in range(len(items) - 1):", 1),
                ("print(items[i])", 2),
                ("show_items(['pen', 'cup', 'map'])", 0),
            ],
            {
                "description": "loop skips the final item",
                "buggy_snippet": "range(len(items) - 1)",
                "fixed_snippet": "range(len(items))",
                "category": "fence_post",
            },
        ),
        "p48": (
            [
                ("def average(numbers):", 0),
                ("total = 0", 1),
                ("for value in numbers:", 1),
                ("total = total + value", 2),
                ("return total / 3", 1),
                ("print(average([2, 4, 6, 8]))", 0),
            ],
            {
                "description": "divides by a fixed count instead of the list length",
                "buggy_snippet": "total / 3",
                "fixed_snippet": "total / len(numbers)",
                "category": "arithmetic",
            },
        ),
        "p49": (
            [
                ("def area(width, height):", 0),
                ("return width + height", 1),
                ("print(area(3, 5))", 0),
            ],
            {
                "description": "adds the sides instead of multiplying them",
                "buggy_snippet": "width + height",
                "fixed_snippet": "width * height",
                "category": "arithmetic",
            },
        ),
        "p50": (
            [
                ("def keep_positive(values):", 0),
                ("kept = []", 1),
                ("for v in values:", 1),
                ("if v < 0:", 2),
                ("break", 3),
                ("kept.append(v)", 2),
                ("return kept", 1),
                ("print(keep_positive([4, -2, 7]))", 0),
            ],
            {
                "description": "stops the loop instead of skipping the value",
                "buggy_snippet": "break",
                "fixed_snippet": "continue",
                "category": "control_flow",
            },
        ),
        "p51": (
            [
                ("def grade(score):", 0),
                ("result = 'C'", 1),
                ("if score >= 90:", 1),
                ("result = 'A'", 2),
                ("if score >= 80:", 1),
                ("result = 'B'", 2),
                ("return result", 1),
                ("print(grade(95))", 0),
            ],
            {
                "description": "second test also fires for top scores",
                "buggy_snippet": "if score >= 80:",
                "fixed_snippet": "elif score >= 80:",
                "category": "control_flow",
            },
        ),
        "p52": (
            [
                ("def add_point(score):", 0),
                ("score = score + 1", 1),
                ("print(add_point(3))", 0),
            ],
            {
                "description": "updates the local copy but never returns it",
                "buggy_snippet": "score = score + 1",
                "fixed_snippet": "return score + 1",
                "category": "scope",
            },
        ),
        "p53": (
            [
                ("def count_longs(words):", 0),
                ("for w in words:", 1),
                ("count = 0", 2),
                ("if len(w) > 4:", 2),
                ("count = count + 1", 3),
                ("return count", 1),
                ("print(count_longs(['apple', 'fig', 'banana']))", 0),
            ],
            {
                "description": "counter resets inside the loop it should survive",
                "buggy_snippet": "for w in words:\n        count = 0",
                "fixed_snippet": "count = 0\n    for w in words:",
                "category": "scope",
            },
        ),
        "p54": (
            [
                ("def wait_for_stop(words):", 0),
                ("for word in words:", 1),
                ("if word is 'stop':", 2),
                ("return True", 3),
                ("return False", 1),
                ("print(wait_for_stop(['go', 'stop']))", 0),
            ],
            {
                "description": "identity test where an equality test was meant",
                "buggy_snippet": "word is 'stop'",
                "fixed_snippet": "word == 'stop'",
                "category": "other",
            },
        ),
    }


def corrupt(texts, rng):
    """Plant 2..6 single-character substitutions across the line texts."""
    candidates = [
        (i, j) for i, text in enumerate(texts) for j, ch in enumerate(text) if ch in CONFUSIONS
    ]
    count = min(rng.randint(2, 6), len(candidates))
    corrupted = list(texts)
    for i, j in sorted(rng.sample(candidates, count)):
        line = corrupted[i]
        corrupted[i] = line[:j] + CONFUSIONS[line[j]] + line[j + 1 :]
    return corrupted


def layout(lines, rng):
    """Boxes for each line: x encodes the indent level, y the reading order."""
    boxes = []
    for i, (text, level) in enumerate(lines):
        x_min = LEFT_MARGIN + INDENT_STEP * level + rng.randint(-X_JITTER, X_JITTER)
        y_min = 40 + LINE_PITCH * i + rng.randint(0, 3)
        height = rng.randint(26, 32)
        x_max = x_min + 8 * len(text) + rng.randint(0, 5)
        boxes.append((x_min, y_min, x_max, y_min + height))
    return boxes


def check_geometry(pid, levels, x_mins, heights):
    """Margins that make both reconstruction routes land on the true levels.

    - mean shift: every level cluster has spread <= 8 px, well under half
      the bandwidth (1.5 * mean height in [39, 48] px), and adjacent level
      clusters sit further apart than the bandwidth, so each cluster yields
      exactly one mode and modes never merge;
    - delta classification: an indent step is at least 0.045 of the page
      width (decision boundary ~0.027), same-level jitter stays within
      0.010, and any back-reference is within 8 px of the recorded line for
      its level while every other recorded level is at least 50 px away.
    """
    assert levels[0] == 0, pid
    present = sorted(set(levels))
    assert present == list(range(len(present))), pid
    for prev, cur in zip(levels, levels[1:]):
        assert cur <= prev + 1, pid

    bandwidth = 1.5 * (sum(heights) / len(heights))
    assert 39.0 <= bandwidth <= 48.0, (pid, bandwidth)
    by_level: dict[int, list[int]] = {}
    for lv, x in zip(levels, x_mins):
        by_level.setdefault(lv, []).append(x)
    for xs in by_level.values():
        assert max(xs) - min(xs) <= 8 < bandwidth / 2, pid
    for lv in present[:-1]:
        gap = min(by_level[lv + 1]) - max(by_level[lv])
        assert gap > bandwidth, (pid, lv, gap, bandwidth)

    for i in range(1, len(levels)):
        delta = (x_mins[i] - x_mins[i - 1]) / PAGE_WIDTH
        if delta < 0:
            recorded: dict[int, int] = {}
            for j in range(i - 1, -1, -1):
                recorded.setdefault(levels[j], x_mins[j])
            assert levels[i] in recorded, pid
            assert abs(x_mins[i] - recorded[levels[i]]) <= 8, pid
            for lv, rx in recorded.items():
                if lv != levels[i]:
                    assert abs(x_mins[i] - rx) >= 50, (pid, i, lv)
        if levels[i] == levels[i - 1] + 1:
            assert delta >= 0.045, (pid, i, delta)
        elif levels[i] == levels[i - 1]:
            assert abs(delta) <= 0.010, (pid, i, delta)
        else:
            assert delta <= -0.045, (pid, i, delta)


def make_image(path, rng):
    img = Image.new("L", (48, 48), 255)
    for _ in range(80):
        img.putpixel((rng.randrange(48), rng.randrange(48)), rng.randrange(200))
    img.save(path)


def aggregate(values):
    n = len(values)
    mean = sum(values) / n
    variance = sum((v - mean) ** 2 for v in values) / (n - 1)
    return {"n": n, "mean": mean, "std_error": math.sqrt(variance) / math.sqrt(n)}


def main():
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data/synthetic")
    for sub in ("gold", "images", "fixtures"):
        (out_root / sub).mkdir(parents=True, exist_ok=True)

    rng = random.Random(SEED)
    bugs = bugged_programs()
    entries = []
    per_program: dict[str, dict[str, float]] = {
        cfg: {} for cfg in UNINDENTED_CONFIGS + TRUE_LEVEL_CONFIGS
    }
    shape_cursor = 0
    seen_digests = set()

    for num in range(1, 56):
        pid = f"p{num:02d}"
        if pid in bugs:
            lines, annotation = bugs[pid]
        else:
            lines = SHAPES[shape_cursor % len(SHAPES)](rng)
            annotation = None
            shape_cursor += 1

        levels = [lv for _, lv in lines]
        gold_text = "\n".join(INDENT_UNIT * lv + text for text, lv in lines)
        if annotation is not None:
            assert annotation["buggy_snippet"] in gold_text, pid
            assert annotation["fixed_snippet"] not in gold_text, pid

        corrupted = corrupt([text for text, _ in lines], rng)
        boxes = layout(lines, rng)
        check_geometry(pid, levels, [b[0] for b in boxes], [b[3] - b[1] for b in boxes])

        (out_root / "gold" / f"{pid}.py").write_text(gold_text + "\n", encoding="utf-8")
        image_path = out_root / "images" / f"{pid}.png"
        make_image(image_path, rng)
        digest = hashlib.sha256(image_path.read_bytes()).hexdigest()
        assert digest not in seen_digests, pid
        seen_digests.add(digest)

        document = {
            "image_width": PAGE_WIDTH,
            "image_height": 40 + LINE_PITCH * len(lines) + 60,
            "provider_id": "replay",
            "lines": [
                {
                    "text": text,
                    "box": {"x_min": x0, "y_min": y0, "x_max": x1, "y_max": y1},
                }
                for text, (x0, y0, x1, y1) in zip(corrupted, boxes)
            ],
        }
        (out_root / "fixtures" / f"{digest}.json").write_text(
            json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )

        unindented = "\n".join(corrupted)
        true_level = "\n".join(INDENT_UNIT * lv + text for text, lv in zip(corrupted, levels))
        for cfg in UNINDENTED_CONFIGS:
            per_program[cfg][pid] = levenshtein_bfs(gold_text, unindented) / len(gold_text) * 100.0
        score_true = levenshtein_bfs(gold_text, true_level) / len(gold_text) * 100.0
        for cfg in TRUE_LEVEL_CONFIGS:
            per_program[cfg][pid] = score_true

        entry = {
            "program_id": pid,
            "image": f"images/{pid}.png",
            "gold": f"gold/{pid}.py",
            "split": "logical_error" if annotation else "correct",
            "heldout": num > 16,
        }
        if annotation:
            entry["annotation"] = annotation
        entries.append(entry)

    manifest = {"dataset": "synthetic-handwriting-v1", "entries": entries}
    (out_root / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    heldout_ids = {e["program_id"] for e in entries if e["heldout"]}
    expected = {
        "seed": SEED,
        "per_program": per_program,
        "aggregate": {
            cfg: {
                "all": aggregate(list(scores.values())),
                "heldout": aggregate([s for p, s in scores.items() if p in heldout_ids]),
            }
            for cfg, scores in per_program.items()
        },
    }
    (out_root / "expected_scores.json").write_text(
        json.dumps(expected, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    logical = sum(1 for e in entries if e["split"] == "logical_error")
    print(f"wrote {len(entries)} programs ({logical} logical_error, {len(heldout_ids)} heldout)")
    for cfg in UNINDENTED_CONFIGS + TRUE_LEVEL_CONFIGS:
        agg = expected["aggregate"][cfg]["all"]
        print(f"  {cfg}: mean {agg['mean']:.3f}% +/- {agg['std_error']:.3f}")


if __name__ == "__main__":
    main()
