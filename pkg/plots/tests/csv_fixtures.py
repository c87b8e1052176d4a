"""Hand-rolled CSV content for the render tests.

Headers are spelled out exactly as the simulator writes them, frozen here
on purpose: a drift in either package should fail a test instead of being
papered over by sharing constants.
"""

PER_SLOT_HEADER = ("slot,unix_time_s,solver,aggregate_rate_ebits_s,"
                   "mean_fidelity,num_connections,max_sats_per_pair,"
                   "max_pairs_per_sat")
ASSIGNMENTS_HEADER = "slot,satellite_id,pair_id,x,weight_ebits_s,fidelity"
LONGEVITY_HEADER = "duration_slots,count"
STATIONS_HEADER = "station_id,lat_deg,lon_deg,receivers,mean_connections"

HEADERS = {
    "per_slot.csv": PER_SLOT_HEADER,
    "assignments.csv": ASSIGNMENTS_HEADER,
    "longevity.csv": LONGEVITY_HEADER,
    "stations.csv": STATIONS_HEADER,
}


def write_csv(path, header, rows=()):
    path.write_text("\n".join([header, *rows]) + "\n")
    return path
