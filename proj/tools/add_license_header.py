#!/usr/bin/env python3
"""Prepend the Apache-2.0 header to every C++ source that lacks it."""

import pathlib
import sys

HEADER = """\
// SPDX-License-Identifier: Apache-2.0
//
// fdris: full-duplex two-RIS cell simulator and DDPG training harness
// Copyright (C) 2026 The fdris authors
// All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

"""

DIRS = ("include", "src", "tools", "tests", "python")
SUFFIXES = {".hpp", ".cpp"}


def main() -> int:
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".").resolve()
    changed = 0
    for d in DIRS:
        for path in sorted((root / d).rglob("*")):
            if path.suffix not in SUFFIXES or not path.is_file():
                continue
            text = path.read_text()
            if text.startswith("// SPDX-License-Identifier:"):
                continue
            path.write_text(HEADER + text)
            changed += 1
    print(f"{changed} files updated")
    return 0


if __name__ == "__main__":
    sys.exit(main())
