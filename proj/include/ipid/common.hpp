#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ipid {

using ValueVector = std::vector<double>;

// Base of every error the library throws. The kind lets callers (the CLI in
// particular) map failures onto distinct exit codes.
enum class ErrorKind {
    InvalidArgument,
    Parse,
    Numerical,
    NotConverged,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(ErrorKind::InvalidArgument, message);
}

// Number of worker threads used by the parallel loops. Defaults to the
// hardware concurrency; results never depend on it.
std::size_t worker_count();
void set_worker_count(std::size_t n);

// Runs body(i) for i in [0, n). Each index is processed exactly once and the
// body must only write to index-owned storage, so the result is independent
// of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ipid
