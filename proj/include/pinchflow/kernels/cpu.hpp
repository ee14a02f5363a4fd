#pragma once

namespace pinchflow::kern {

/// Runtime CPU feature probe used by the kernel dispatcher.
bool cpu_has_avx2();

} // namespace pinchflow::kern
