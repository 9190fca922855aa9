#include "gridcast/types.hpp"

#include <stdexcept>

namespace gridcast {

int feature_index(std::string_view name) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[static_cast<std::size_t>(i)] == name) return i;
  }
  return -1;
}

double& feature_ref(DailyWeather& day, int index) {
  switch (index) {
    case 0: return day.t_max;
    case 1: return day.t_ave;
    case 2: return day.t_min;
    case 3: return day.hdd;
    case 4: return day.cdd;
    case 5: return day.w_pea;
    case 6: return day.w_ave;
    case 7: return day.w_sus;
    case 8: return day.p_rain;
    case 9: return day.pressure;
    case 10: return day.lightning;
    default: throw std::out_of_range("feature index " + std::to_string(index));
  }
}

double feature_value(const DailyWeather& day, int index) {
  return feature_ref(const_cast<DailyWeather&>(day), index);
}

double target_value(const DailyRecord& record, Target t) {
  return t == Target::sustained ? record.n_sustained : record.m_momentary;
}

}  // namespace gridcast
