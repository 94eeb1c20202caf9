#pragma once

#include <array>

namespace reference_values {

/// Homogeneous ARE of the rank test with respect to the pseudo-FvML test, k = 3.
/// Rows: FvML(1), FvML(2), FvML(6), Lin(2), Lin(4), Log(2.5), Log(4), Logis(1,1), Logis(2,1).
/// Columns: scores from FvML(2), FvML(6), Lin(2), Lin(4), Log(2.5), Logis(1,1), Logis(2,1).
inline constexpr std::array<std::array<double, 7>, 9> kAreTable{{
    {0.9744, 0.8787, 0.9813, 0.9979, 0.9027, 0.9321, 0.7364},
    {1.0000, 0.9556, 0.9978, 0.9586, 0.9749, 0.9823, 0.8480},
    {0.9555, 1.0000, 0.9381, 0.8517, 0.9768, 0.9911, 0.9280},
    {1.0539, 0.9909, 1.0562, 1.0215, 1.0212, 1.0247, 0.8796},
    {0.9709, 0.8627, 0.9795, 1.0128, 0.8856, 0.9231, 0.7097},
    {1.1610, 1.1633, 1.1514, 1.0413, 1.1908, 1.1625, 1.0951},
    {1.0182, 0.9216, 1.0261, 1.0347, 0.9503, 0.9741, 0.7851},
    {1.0768, 1.0865, 1.0635, 0.9991, 1.0701, 1.0962, 0.9778},
    {1.3182, 1.4426, 1.2946, 1.0893, 1.4294, 1.3865, 1.5544},
}};

} // namespace reference_values
