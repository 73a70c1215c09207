#ifndef CONCEAL_ERRORS_HPP
#define CONCEAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace conceal {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An event name is not part of the partition in use.
struct UnknownEventError : Error {
    using Error::Error;
};

// The unobservable subgraph contains a cycle; closures would not be
// well-founded, so the offending walk is reported instead.
struct UnobservableCycleError : Error {
    using Error::Error;
};

// A construction was handed a system whose validation report fails.
struct InvalidSystemError : Error {
    using Error::Error;
};

// A defensive construction was handed an initial state that is already
// Secret-classified; no defense can start there.
struct SecretInitialError : Error {
    using Error::Error;
};

// Brute-force guard: requested horizon or instance size exceeds what the
// oracle is willing to enumerate.
struct HorizonError : Error {
    using Error::Error;
};

// A strategy was requested from inputs that do not admit one.
struct NotEnforceableError : Error {
    using Error::Error;
};

// A defense session observed an event for which no feasible action keeps
// the emitted observation alive.
struct NoFeasibleActionError : Error {
    using Error::Error;
};

}  // namespace conceal

#endif
