#include "repstab/errors.hpp"

namespace repstab {

void fail(errc code, const std::string& what) { throw Error(code, what); }

} // namespace repstab
