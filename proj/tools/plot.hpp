#pragma once

#include <string>
#include <string_view>

namespace scdim::cli {

/// Renders a profile CSV as an SVG scatter plot of bound against s. The
/// result depends only on the CSV text and the axis mode; CSV comment lines
/// are carried into an SVG comment.
std::string render_profile_svg(std::string_view csv, bool log_log);

}  // namespace scdim::cli
