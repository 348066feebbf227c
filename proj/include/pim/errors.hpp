#pragma once

#include <stdexcept>
#include <string>

namespace pim {

// Fault categories; the CLI maps them onto stable process exit codes.
enum class Fault {
    validation,           // bad inputs, invalid graphs, incompatible tables
    io,                   // unreadable/unwritable files, malformed records
    infeasible_schedule,  // reset-probability schedule leaves (0,1]
    non_convergence,      // iterative routine hit its cap
};

class Error : public std::runtime_error {
public:
    Error(Fault fault, const std::string &message)
        : std::runtime_error(message), fault_(fault) {}

    Fault fault() const { return fault_; }

private:
    Fault fault_;
};

inline int exit_code(Fault f) {
    switch (f) {
        case Fault::validation: return 2;
        case Fault::io: return 3;
        case Fault::infeasible_schedule: return 4;
        case Fault::non_convergence: return 5;
    }
    return 1;
}

}  // namespace pim
