// Generated by tools/gen_k1_chebyshev.py. Do not edit.
#pragma once

#include <array>

namespace acop::detail {

inline constexpr std::array<double, 10> kK1SmallI1 = {
    6.4175899699118740499e-1,
    1.4753932014919341906e-1,
    5.8987426800207883051e-3,
    1.198813717463870829e-4,
    1.4739165119093126904e-6,
    1.2138074968740921606e-8,
    7.1611066927992794695e-11,
    3.1748793113101199308e-13,
    1.0962998348773075276e-15,
    3.0315021220933554353e-18};

inline constexpr std::array<double, 11> kK1SmallRest = {
    7.6265011366947388527e-1,
    -3.5315596077654487567e-1,
    -1.2261118082265714823e-1,
    -6.9757238596398643502e-3,
    -1.730288957513052063e-4,
    -2.433406141565968235e-6,
    -2.2133876307347258558e-8,
    -1.4114883926335277611e-10,
    -6.6669016941993290061e-13,
    -2.4274498505193659339e-15,
    -7.0238634793862875972e-18};

inline constexpr std::array<double, 26> kK1LargeScaled = {
    1.3603130952422213347,
    1.0392373657681723844e-1,
    -2.8578168596227793868e-3,
    1.9521551847135163111e-4,
    -1.93619797416608296e-5,
    2.4064849478372171171e-6,
    -3.5019606030878125421e-7,
    5.7410841254500492923e-8,
    -1.0345762465678097027e-8,
    2.0150497551970346161e-9,
    -4.1903547593419255842e-10,
    9.2183151876053141258e-11,
    -2.1299678384277910216e-11,
    5.1396396734823435404e-12,
    -1.2891739609498229352e-12,
    3.3484196660522431201e-13,
    -8.9767051820101460692e-14,
    2.4771544242195986813e-14,
    -7.0198370892147688513e-15,
    2.0387031662398608799e-15,
    -6.0570472706430178228e-16,
    1.8380935752430454256e-16,
    -5.6894628491936483743e-17,
    1.7940510478863572914e-17,
    -5.7567444820733024503e-18,
    1.8778651901623267401e-18};

}  // namespace acop::detail
