#!/usr/bin/env python3
"""Reference oracle child speaking the line-delimited JSON protocol.

Handshake on startup:   {"n_features": 2, "n_classes": 2}
Request per batch:      {"instances": [[...], ...]}
Reply per batch:        {"probs": [[...], ...]}

Implements the two-feature OR gate: p(class 1) = 1 when either feature is
set. The extra flags deliberately misbehave, for exercising the parent's
error handling.
"""

import argparse
import json
import os
import sys
import time


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bad-shape", action="store_true",
                        help="emit 3 probabilities per instance")
    parser.add_argument("--sleep-ms", type=int, default=0,
                        help="delay before every reply")
    parser.add_argument("--crash-flag", default=None,
                        help="crash on the first request unless this file "
                             "exists; creates it before crashing")
    args = parser.parse_args()

    print(json.dumps({"n_features": 2, "n_classes": 2}), flush=True)

    for line in sys.stdin:
        if not line.strip():
            continue
        request = json.loads(line)
        if args.crash_flag is not None and not os.path.exists(args.crash_flag):
            open(args.crash_flag, "w").close()
            sys.exit(1)
        if args.sleep_ms:
            time.sleep(args.sleep_ms / 1000.0)
        probs = []
        for instance in request["instances"]:
            on = 1.0 if (instance[0] >= 0.5 or instance[1] >= 0.5) else 0.0
            row = [1.0 - on, on]
            if args.bad_shape:
                row.append(0.0)
            probs.append(row)
        print(json.dumps({"probs": probs}), flush=True)


if __name__ == "__main__":
    main()
