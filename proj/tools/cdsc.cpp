// Copyright 2026 The cdsc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "cdsc/cli.hpp"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        auto config = cdsc::cli::parse_config(args);
        auto report = cdsc::cli::run_command(config);
        cdsc::cli::emit_report(report, config.out);
        return report.exit_code();
    } catch (const cdsc::cli::HelpRequested &help) {
        std::cout << help.what();
        return 0;
    } catch (const std::exception &e) {
        std::cerr << "cdsc: error: " << e.what() << "\n";
        return 1;
    }
}
