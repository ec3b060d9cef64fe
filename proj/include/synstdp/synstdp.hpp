#pragma once

#include "synstdp/analysis.hpp"
#include "synstdp/closedform.hpp"
#include "synstdp/config.hpp"
#include "synstdp/dendrite.hpp"
#include "synstdp/device.hpp"
#include "synstdp/energy.hpp"
#include "synstdp/errors.hpp"
#include "synstdp/io.hpp"
#include "synstdp/montecarlo.hpp"
#include "synstdp/pairing.hpp"
#include "synstdp/random.hpp"
#include "synstdp/validation.hpp"
#include "synstdp/waveform.hpp"
