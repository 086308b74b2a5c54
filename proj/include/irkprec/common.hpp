#ifndef IRKPREC_COMMON_HPP
#define IRKPREC_COMMON_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace irkprec {

using Vec = std::vector<double>;

/// Thrown when a factorization meets a zero pivot or a matrix is
/// structurally/numerically singular. The message names the failing
/// row/stage index.
class SingularError : public std::runtime_error {
public:
    explicit SingularError(const std::string& what, int index = -1)
        : std::runtime_error(what), index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

/// Thrown when an iterative numerical procedure fails to converge.
/// Partial estimates, when meaningful, ride along.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what,
                            std::vector<double> partial = {})
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const std::vector<double>& partial() const { return partial_; }

private:
    std::vector<double> partial_;
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace irkprec

#endif
