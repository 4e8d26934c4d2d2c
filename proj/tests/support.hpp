#pragma once

#include "wbansim/analytics.hpp"
#include "wbansim/esb_link.hpp"

namespace wbansim::testing {

// default_pipeline() without jitter.
inline PipelineModel quiet_pipeline() {
  PipelineModel p = default_pipeline();
  p.jitter.family = JitterFamily::None;
  p.jitter.sd_us.fill(0.0);
  return p;
}

inline ChannelModel clean_channel() {
  ChannelModel c;
  c.p_loss = 0.0;
  c.p_corrupt = 0.0;
  return c;
}

// 3-sigma half-width of a binomial proportion.
inline double binomial_3sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace wbansim::testing
