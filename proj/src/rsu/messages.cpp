#include "gapflow/rsu/messages.hpp"

#include <stdexcept>

namespace gapflow::rsu {

void GapRequest::validate() const {
  if (size < 2) throw std::invalid_argument("request size must be >= 2");
  if (current_gaps.size() != static_cast<std::size_t>(size - 1)) {
    throw std::invalid_argument("request current_gaps must have size - 1 entries");
  }
}

MessageType type_of(const Message& message) {
  switch (message.index()) {
    case 0: return MessageType::request;
    case 1: return MessageType::response;
    default: return MessageType::error;
  }
}

}  // namespace gapflow::rsu
