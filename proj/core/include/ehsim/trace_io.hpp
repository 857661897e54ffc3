#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ehsim/engine.hpp"

namespace ehsim {

inline constexpr std::string_view kTraceCsvHeader = "t_s,v_c_V,load_state,pm_on,eh_connected,p_eh_W,p_cl_W,i_c_A";

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_double(double value);

/// One header line, then one line per record. Booleans are written as 0/1.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

/// {"leakage_in_connected_modes": b, "records": [...], "events": [...]}
void write_trace_json(std::ostream& out, const SimTrace& trace, int indent = -1);

/// Parses the document written by write_trace_json().
[[nodiscard]] SimTrace read_trace_json(std::istream& in);

}  // namespace ehsim
