# Copyright 2026 The qrc-absorb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs a tiny sweep through the CLI and validates summary.json against docs/."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    cli, docs, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    subprocess.run(
        [cli, "full-sweep", "--out", str(work), "--workers", "1",
         "--set", "n_qubits=2", "--set", "ensemble_size=1",
         "--set", "gamma_grid={\"min_exponent\":-1,\"max_exponent\":1,\"points\":3}",
         "--set", "train_len=100", "--set", "test_len=100",
         "--set", "threshold_repetitions=5", "--set", "delay_cap=5",
         "--set", "s_grid=[0.5,1.0]"],
        check=True)
    summary_schema = json.loads((docs / "summary.schema.json").read_text())
    config_schema = json.loads((docs / "config.schema.json").read_text())
    registry = Registry().with_resource("config.schema.json", Resource.from_contents(config_schema))
    summary = json.loads((work / "summary.json").read_text(encoding="utf-8"))
    jsonschema.Draft202012Validator(summary_schema, registry=registry).validate(summary)
    jsonschema.Draft202012Validator(config_schema).validate(json.loads(
        (docs.parent / "configs" / "default.json").read_text()))
    print("summary.json and configs/default.json validate")
    return 0


if __name__ == "__main__":
    sys.exit(main())
