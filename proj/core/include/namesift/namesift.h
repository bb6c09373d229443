#pragma once

#include "namesift/baselines.h"
#include "namesift/corpus.h"
#include "namesift/errors.h"
#include "namesift/eval.h"
#include "namesift/features.h"
#include "namesift/models.h"
