#pragma once

#include <stdexcept>
#include <string>

namespace qfabric {

/// Thrown when a request exceeds what a scheme can address or allocate.
/// deficit() reports how far over budget the request was, in the unit of
/// the operation that threw (stages, resonators, hertz of bandwidth, ...).
class capacity_error : public std::runtime_error {
public:
    capacity_error(const std::string& what, double deficit)
        : std::runtime_error(what), deficit_(deficit) {}

    double deficit() const noexcept { return deficit_; }

private:
    double deficit_;
};

}  // namespace qfabric
