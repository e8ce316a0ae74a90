#include "anthro/errors.hpp"

namespace anthro {

namespace {
std::string with_line(const std::string& msg, std::size_t line)
{
    return line == 0 ? msg : "line " + std::to_string(line) + ": " + msg;
}
} // namespace

ParseError::ParseError(const std::string& msg, std::size_t line)
    : DataError(with_line(msg, line)), line_(line)
{
}

DuplicateLandmarkError::DuplicateLandmarkError(const std::string& subject, int id)
    : DataError("duplicate landmark id " + std::to_string(id) + " in group " + subject), id_(id)
{
}

MissingLandmarkError::MissingLandmarkError(int id, int pair_index)
    : DataError("missing landmark " + std::to_string(id) +
                (pair_index >= 0 ? " (pair " + std::to_string(pair_index) + ")" : std::string{})),
      id_(id), pair_(pair_index)
{
}

} // namespace anthro
