#pragma once

#include <stdexcept>
#include <string>

namespace slowpass {

/// Argument outside the mathematical domain of an operation (non-finite
/// input, non-positive epsilon, y outside the quadrature window, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke an operation's contract (out-of-order samples, classifying
/// a report without a tipping point, empty analysis window).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Hypotheses of an analytic result do not hold for the given parameters.
class PreconditionError : public UsageError {
public:
    using UsageError::UsageError;
};

/// Bisection could not start: membership is the same at both bracket ends.
class BracketingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every requested cell exceeded the step budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace slowpass
