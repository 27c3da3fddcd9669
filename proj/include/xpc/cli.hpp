#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xpc::cli {

// Subcommands: gen-corpus, stats, train, extract, eval-snippets,
// eval-rationales, snippet-stats, report-savings. Returns the process exit
// status: 0 on success, nonzero with a diagnostic on `err` otherwise.
int run_command(int argc, char** argv);
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace xpc::cli
