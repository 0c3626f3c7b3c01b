#pragma once

// Shared constants for the normal-cdf kernels. The exponential is a Cephes
// style Pade form; erfc is Cody's rational Chebyshev approximation.
namespace corrsurf::kernels::detail {

inline constexpr double kLog2e = 1.4426950408889634073599;
inline constexpr double kExpC1 = 6.93145751953125E-1;
inline constexpr double kExpC2 = 1.42860682030941723212E-6;
inline constexpr double kExpP[3] = {1.26177193074810590878E-4, 3.02994407707441961300E-2,
                                    9.99999999999999999910E-1};
inline constexpr double kExpQ[4] = {3.00198505138664455042E-6, 2.52448340349684104192E-3,
                                    2.27265548208155028766E-1, 2.00000000000000000009E0};
// Below this exp underflows to zero in double precision.
inline constexpr double kExpMin = -745.2;

inline constexpr double kErfA[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021,
                                    3209.37758913846947, .185777706184603153};
inline constexpr double kErfB[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228,
                                    2844.23683343917062};
inline constexpr double kErfC[9] = {.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                                    298.635138197400131, 881.95222124176909,  1712.04761263407058,
                                    2051.07837782607147, 1230.33935479799725, 2.15311535474403846e-8};
inline constexpr double kErfD[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858,
                                    1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
                                    3439.36767414372164, 1230.33935480374942};
inline constexpr double kErfP[6] = {.305326634961232344, .360344899949804439, .125781726111229246,
                                    .0160837851487422766, 6.58749161529837803e-4, .0163153871373020978};
inline constexpr double kErfQ[5] = {2.56852019228982242, 1.87295284992346047, .527905102951428412,
                                    .0605183413124413191, .00233520497626869185};
inline constexpr double kSqrtPiInv = 0.56418958354775628695;
inline constexpr double kErfThresh = 0.46875;
inline constexpr double kErfXsmall = 1.11e-16;
inline constexpr double kErfXbig = 26.543;
inline constexpr double kSqrtHalf = 0.70710678118654752440;

} // namespace corrsurf::kernels::detail
