#include "dil/errors.hpp"

namespace dil {

DensityError::DensityError(const std::string& what, bool src, int w)
    : Error(what), in_source(src), witness(w) {}

NoLog::NoLog(const std::string& what, double r) : Error(what), residual(r) {}

NestingError::NestingError(const std::string& what, int k) : Error(what), step(k) {}

}  // namespace dil
