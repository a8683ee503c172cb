#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace g3eq {

// Entry point of the g3eq tool; args exclude the program name. Returns the
// process exit status: 0 success, 1 check or transform failure, 2 parse or
// I/O failure.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace g3eq
