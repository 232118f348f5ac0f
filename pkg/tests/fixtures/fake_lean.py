"""Minimal stand-in for ``lean`` used to test the subprocess plumbing.

It warns about every ``sorry``, reports ``= :=`` as a syntax error, sleeps
when the file mentions SLEEP and prints a version banner for ``--version``.
"""

import sys
import time

if sys.argv[1] == "--version":
    print("Lean (version 4.99.0-fake)")
    sys.exit(0)

path = sys.argv[1]
text = open(path, encoding="utf-8").read()
if "SLEEP" in text:
    time.sleep(5)
failed = False
for n, line in enumerate(text.splitlines(), 1):
    col = line.find("= :=")
    if col >= 0:
        print(f"{path}:{n}:{col + 2}: error: unexpected token ':='; expected term")
        failed = True
    elif "sorry" in line:
        print(f"{path}:{n}:8: warning: declaration uses 'sorry'")
sys.exit(1 if failed else 0)
