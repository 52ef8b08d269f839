#include "hybisim/thermostat.hpp"

namespace hybisim {

const char* thermostat_model_text() {
    return R"(# Two-area heater: T1 is the heated area, T2 an enclosed area coupled to it.
# The controller must keep the pair inside the band |T1 - T2| <= 0.25; the
# unsafe modes cover the two ways of leaving that band.
vars T1 T2

mode OFF_safe output OFF_safe
  flow T1' = -T1
  flow T2' = T1 - T2
  invariant abs(T1 - T2) <= 0.25; T1 >= 0; T1 <= 1; T2 >= 0; T2 <= 1

mode ON_safe output ON_safe
  flow T1' = -T1 + 1
  flow T2' = T1 - T2
  invariant abs(T1 - T2) <= 0.25; T1 >= 0; T1 <= 1; T2 >= 0; T2 <= 1

mode OFF_unsafe output OFF_unsafe
  flow T1' = -T1
  flow T2' = T1 - T2
  invariant T2 - T1 >= 0.25; T1 >= 0; T1 <= 1; T2 >= 0; T2 <= 1
  invariant T1 - T2 >= 0.25; T1 >= 0; T1 <= 1; T2 >= 0; T2 <= 1

mode ON_unsafe output ON_unsafe
  flow T1' = -T1 + 1
  flow T2' = T1 - T2
  invariant T2 - T1 >= 0.25; T1 >= 0; T1 <= 1; T2 >= 0; T2 <= 1
  invariant T1 - T2 >= 0.25; T1 >= 0; T1 <= 1; T2 >= 0; T2 <= 1

# Guards sit on the portions of each mode boundary the flow exits through.
edge OFF_safe -> ON_safe input on
  guard T2 - T1 = 0.25; T1 >= 0.25; T1 <= 0.75

edge OFF_safe -> OFF_unsafe input off
  guard T2 - T1 = 0.25; T1 >= 0.25; T1 <= 0.75

edge ON_safe -> OFF_safe input off
  guard T1 - T2 = 0.25; T1 >= 0.25; T1 <= 0.75

edge ON_safe -> ON_unsafe input on
  guard T1 - T2 = 0.25; T1 >= 0.25; T1 <= 0.75

edge OFF_unsafe -> OFF_safe input off
  guard T2 - T1 = 0.25; T1 >= 0; T1 <= 0.25
  guard T1 - T2 = 0.25; T1 >= 0.25; T1 <= 1

edge OFF_unsafe -> ON_safe input on
  guard T2 - T1 = 0.25; T1 >= 0; T1 <= 0.25

edge OFF_unsafe -> ON_unsafe input on
  guard T1 - T2 = 0.25; T1 >= 0.25; T1 <= 1

edge ON_unsafe -> ON_safe input on
  guard T1 - T2 = 0.25; T1 >= 0.75; T1 <= 1
  guard T2 - T1 = 0.25; T1 >= 0; T1 <= 0.75

edge ON_unsafe -> OFF_safe input off
  guard T1 - T2 = 0.25; T1 >= 0.75; T1 <= 1

edge ON_unsafe -> OFF_unsafe input off
  guard T2 - T1 = 0.25; T1 >= 0; T1 <= 0.75
)";
}

}  // namespace hybisim
