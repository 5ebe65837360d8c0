"""Deterministic CSMA/CA simulator with a distributed variable-length
fair scheduler."""

__version__ = "0.1.0"

from .channel import (BernoulliChannel, CaptureClass, ChannelState,
                      GilbertElliott, MarkovChannel, Outcome, PerfectChannel,
                      ReceptionOutcome, resolve_reception,
                      stationary_loss_prob)
from .config import ScenarioConfig, StationCfg, TopologyCfg, validate
from .engine import (MediumEvent, PhyParams, Simulation, StationMac,
                     apply_beb, draw_backoff, packet_airtime, resolve_slot,
                     run)
from .metrics import (MetricsTrace, jain_index, mean_jain_1s,
                      weighted_fairness_error, windowed_throughput)
from .multidomain import (BurstController, ContentionGraph,
                          ThroughputMonitor, update_burst)
from .vls import (ApCounter, ClockSpeedTable, Metric, Stability, VlsState,
                  ap_variant_burst, burst_length_on_win, compute_c_broadcast,
                  merge_clock_speeds, metric_quantum, on_burst_progress,
                  on_virtual_slot, stability_check, stability_check_markov)
