#pragma once

#include <cmath>
#include <limits>

// Exponentially scaled modified Bessel function I0, after the SLATEC FNLIB
// Chebyshev expansions (Fullerton, LANL). The scaled form e^{-x} I0(x) stays
// bounded for all x, which is what the geometry-factor quadrature needs:
// the raw I0 overflows already near x ~ 710.

namespace nestif::bessel {

namespace detail {

// Clenshaw recurrence for a Chebyshev series on [-1, 1].
inline double chebyshev(double x, const double* cs, int n) {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  const double twox = 2.0 * x;
  for (int i = n - 1; i >= 0; --i) {
    b2 = b1;
    b1 = b0;
    b0 = twox * b1 - b2 + cs[i];
  }
  return 0.5 * (b0 - b2);
}

// Series for BI0 on [0, 9], weighted error 9.5e-34.
inline constexpr double bi0cs[18] = {
    -0.07660547252839144951081894976243285,
    1.927337953993808269952408750881196,
    0.2282644586920301338937029292330415,
    0.01304891466707290428079334210691888,
    4.344270900816487451378682681026107e-4,
    9.422657686001934663923171744118766e-6,
    1.434006289510691079962091878179957e-7,
    1.613849069661749069915419719994611e-9,
    1.396650044535669699495092708142522e-11,
    9.579451725505445344627523171893333e-14,
    5.333981859862502131015107744e-16,
    2.458716088437470774696785919999999e-18,
    9.535680890248770026944341333333333e-21,
    3.154382039721427336789333333333333e-23,
    9.004564101094637431466666666666666e-26,
    2.240647369123670016e-28,
    4.903034603242837333333333333333333e-31,
    9.508172606122666666666666666666666e-34};

// Series for AI0 on [1/8, 1/3] (in 1/x), weighted error 2.7e-32.
inline constexpr double ai0cs[46] = {
    0.07575994494023795942729872037438,
    0.007591380810823345507292978733204,
    4.153131338923750501863197491382e-4,
    1.07007646343907307358242970217e-5,
    -7.90117997921289466075031948573e-6,
    -7.826143501438752269788989806909e-7,
    2.783849942948870806381185389857e-7,
    8.252472600612027191966829133198e-9,
    -1.204463945520199179054960891103e-8,
    1.559648598506076443612287527928e-9,
    2.292556367103316543477254802857e-10,
    -1.191622884279064603677774234478e-10,
    1.757854916032409830218331247743e-11,
    1.128224463218900517144411356824e-12,
    -1.146848625927298877729633876982e-12,
    2.715592054803662872643651921606e-13,
    -2.415874666562687838442475720281e-14,
    -6.084469888255125064606099639224e-15,
    3.145705077175477293708360267303e-15,
    -7.172212924871187717962175059176e-16,
    7.874493403454103396083909603327e-17,
    1.004802753009462402345244571839e-17,
    -7.56689536535053485342843588881e-18,
    2.150380106876119887812051287845e-18,
    -3.754858341830874429151584452608e-19,
    2.354065842226992576900757105322e-20,
    1.11466761204792853022637335511e-20,
    -5.398891884396990378696779322709e-21,
    1.439598792240752677042858404522e-21,
    -2.591916360111093406460818401962e-22,
    2.23813318399858390743409229824e-23,
    5.250672575364771172772216831999e-24,
    -3.249904138533230784173432285866e-24,
    9.9242141032050379278572847104e-25,
    -2.164992254244669523146554299733e-25,
    3.233609471943594083973332991999e-26,
    -1.184620207396742489824733866666e-27,
    -1.281671853950498650548338687999e-27,
    5.827015182279390511605568853333e-28,
    -1.668222326026109719364501503999e-28,
    3.6253095105415699757006848e-29,
    -5.733627999055713589945958399999e-30,
    3.736796722063098229642581333333e-31,
    1.602073983156851963365512533333e-31,
    -8.700424864057229884522495999999e-32,
    2.741320937937481145603413333333e-32};

// Series for AI02 on [0, 1/8] (in 1/x), weighted error 2.0e-32.
inline constexpr double ai02cs[69] = {
    0.0544904110141088316078960962268,
    0.003369116478255694089897856629799,
    6.889758346916823984262639143011e-5,
    2.891370520834756482966924023232e-6,
    2.048918589469063741827605340931e-7,
    2.266668990498178064593277431361e-8,
    3.396232025708386345150843969523e-9,
    4.940602388224969589104824497835e-10,
    1.188914710784643834240845251963e-11,
    -3.149916527963241364538648629619e-11,
    -1.321581184044771311875407399267e-11,
    -1.794178531506806117779435740269e-12,
    7.180124451383666233671064293469e-13,
    3.852778382742142701140898017776e-13,
    1.540086217521409826913258233397e-14,
    -4.150569347287222086626899720156e-14,
    -9.554846698828307648702144943125e-15,
    3.811680669352622420746055355118e-15,
    1.772560133056526383604932666758e-15,
    -3.425485619677219134619247903282e-16,
    -2.827623980516583484942055937594e-16,
    3.461222867697461093097062508134e-17,
    4.465621420296759999010420542843e-17,
    -4.830504485944182071255254037954e-18,
    -7.233180487874753954562272409245e-18,
    9.92147541217369859888046093981e-19,
    1.193650890845982085504399499242e-18,
    -2.488709837150807235720544916602e-19,
    -1.938426454160905928984697811326e-19,
    6.444656697373443868783019493949e-20,
    2.886051596289224326481713830734e-20,
    -1.601954907174971807061671562007e-20,
    -3.270815010592314720891935674859e-21,
    3.686932283826409181146007239393e-21,
    1.268297648030950153013595297109e-23,
    -7.549825019377273907696366644101e-22,
    1.502133571377835349637127890534e-22,
    1.265195883509648534932087992483e-22,
    -6.100998370083680708629408916002e-23,
    -1.268809629260128264368720959242e-23,
    1.661016099890741457840384874905e-23,
    -1.585194335765885579379705048814e-24,
    -3.302645405968217800953817667556e-24,
    1.313580902839239781740396231174e-24,
    3.689040246671156793314256372804e-25,
    -4.210141910461689149219782472499e-25,
    4.79195459108286578063171401373e-26,
    8.459470390221821795299717074124e-26,
    -4.03980094087283249314607937181e-26,
    -6.434714653650431347301008504695e-27,
    1.225743398875665990344647369905e-26,
    -2.934391316025708923198798211754e-27,
    -1.961311309194982926203712057289e-27,
    1.503520374822193424162299003098e-27,
    -9.588720515744826552033863882069e-29,
    -3.483339380817045486394411085114e-28,
    1.690903610263043673062449607256e-28,
    1.982866538735603043894001157188e-29,
    -5.317498081491816214575830025284e-29,
    1.803306629888392946235014503901e-29,
    6.213093341454893175884053112422e-30,
    -7.69218929277216186320072806673e-30,
    1.858252826111702542625560165963e-30,
    1.237585142281395724899271545541e-30,
    -1.102259120409223803217794787792e-30,
    1.886287118039704490077874479431e-31,
    2.16019687224365891314903141406e-31,
    -1.605454124919743200584465949655e-31,
    1.965352984594290603938848073318e-32};

}  // namespace detail

/// e^{-x} I0(x) for x >= 0, accurate to full double precision.
inline double i0e(double x) {
  using namespace detail;
  static const double xsml =
      std::sqrt(std::numeric_limits<double>::epsilon() * 4.5);
  if (x < 0.0) x = -x;  // I0 is even
  if (x <= 3.0) {
    if (x <= xsml) return 1.0 - x;
    return std::exp(-x) * (2.75 + chebyshev(x * x / 4.5 - 1.0, bi0cs, 18));
  }
  if (x <= 8.0) {
    return (chebyshev((48.0 / x - 11.0) / 5.0, ai0cs, 46) + 0.375) /
           std::sqrt(x);
  }
  return (chebyshev(16.0 / x - 1.0, ai02cs, 69) + 0.375) / std::sqrt(x);
}

/// I0(x); overflows for x beyond ~709, prefer i0e for large arguments.
inline double i0(double x) { return std::exp(std::abs(x)) * i0e(x); }

}  // namespace nestif::bessel
