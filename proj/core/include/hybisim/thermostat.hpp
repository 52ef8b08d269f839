#pragma once

namespace hybisim {

// Bundled demonstration model: a two-area heater whose measured areas must
// stay inside a safety band.  Identical to models/thermostat.hds.
const char* thermostat_model_text();

}  // namespace hybisim
