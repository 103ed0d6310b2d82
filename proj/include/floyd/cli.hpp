// Command-line front end. Kept in the library so tests can drive it directly.
#ifndef FLOYD_CLI_HPP_
#define FLOYD_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace floyd {

// argv-style arguments without the program name. Exit status: 0 affirmative
// (accept, equivalent, conflict-free), 1 negative, 2 input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace floyd

#endif  // FLOYD_CLI_HPP_
