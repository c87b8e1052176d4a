"""Regenerate the bundled 1-degree land mask.

The mask is a coarse hand-digitized approximation: continent coastlines
are traced as polygons with a few dozen vertices each, inland seas are
subtracted, and every cell containing a bundled population center is
forced to land (cities are on land by definition, and the coarse
coastlines would otherwise clip a few coastal ones).  Cell (row, col)
covers latitudes [89 - row, 90 - row] and longitudes [col - 180,
col - 179]; a cell is tested at its center.

Usage: python scripts/make_land_mask.py [--ascii] [--out PATH]
"""

import argparse
import csv
from pathlib import Path

from shapely.geometry import Point, Polygon
from shapely.prepared import prep

ROWS, COLS = 180, 360

# (lon, lat) vertex rings, very coarse. Longitudes may exceed 180 so a
# ring never wraps; lookup tests lon, lon+360, lon-360.
LAND = {
    "north_america": [
        (-168, 65.5), (-166, 61), (-158, 57), (-153, 58.5), (-145, 60.5),
        (-136, 57.5), (-130, 54), (-125, 48.5), (-124, 40), (-120, 34),
        (-117, 32.5), (-112, 24.5), (-109.5, 23), (-106, 20), (-97, 16),
        (-93.5, 15), (-90, 13.5), (-85.5, 11), (-83, 8.5), (-78, 7),
        (-77, 8.8), (-82, 9.5), (-83.5, 10.5), (-85.5, 13), (-88, 16),
        (-87, 18), (-86.8, 21.3), (-90.5, 21.5), (-91, 18.8), (-94, 18.5),
        (-97.5, 22), (-97.2, 26), (-94, 29.5), (-89, 29.2), (-84, 30),
        (-82.8, 28), (-81, 25.2), (-80, 26.8), (-81.3, 31.5), (-75.5, 35.2),
        (-76, 38), (-74, 40.5), (-70, 41.7), (-66.5, 44.8), (-64, 45.5),
        (-60.8, 45.8), (-64.5, 48.5), (-66.5, 50), (-60, 52), (-64.5, 58),
        (-70, 60.5), (-77.5, 62.3), (-79, 62.2), (-77.5, 55.5), (-79.5, 51.5),
        (-87, 51.5), (-93.5, 53.5), (-94.5, 57), (-91, 62.5), (-86, 66.5),
        (-88, 68.5), (-96, 68.2), (-102, 68.5), (-110, 68), (-118, 69),
        (-128, 69.5), (-135, 69.2), (-141, 69.8), (-148, 70.5), (-157, 71.2),
        (-162, 70), (-167, 68.2),
    ],
    "greenland": [
        (-46, 60), (-43, 60.5), (-40, 63.5), (-32, 67.5), (-22, 70), (-19, 75),
        (-21, 80), (-30, 83.3), (-58, 82.3), (-73, 78.3), (-68, 76), (-58, 75),
        (-55, 69.5), (-53, 65.5), (-49, 61.5),
    ],
    "south_america": [
        (-77.2, 7.8), (-75.5, 10.8), (-71.5, 12.5), (-68, 11), (-64, 10.6),
        (-60, 8.6), (-55, 6), (-52, 4.5), (-50.5, 0.5), (-44.5, -2.7),
        (-39.5, -4.5), (-35, -5.5), (-36.5, -10.5), (-39, -14), (-39.5, -18),
        (-41, -22), (-46, -24), (-48.5, -26), (-52, -32), (-56.5, -34.8),
        (-62, -39), (-64.8, -41), (-65.5, -45), (-68, -49.5), (-68.5, -52.3),
        (-65.5, -54.8), (-70, -55.3), (-73.8, -52), (-73.5, -48), (-73.8, -43),
        (-73.5, -38), (-71.5, -32.5), (-70.3, -27), (-70.3, -20), (-71.5, -17.5),
        (-76, -14), (-79, -7.5), (-81.3, -5), (-80.5, -2), (-77.8, 1.5),
        (-77.5, 5),
    ],
    "africa": [
        (-9.8, 31), (-6.2, 35.3), (-1, 36.5), (4, 36.9), (10.2, 37.2),
        (11.2, 35), (15.5, 32), (20, 32.7), (25, 32), (30.5, 31.5),
        (33.5, 31.1), (32.5, 29.7), (34, 27), (35.5, 23.5), (37.2, 20.8),
        (38.8, 17.5), (40, 15.5), (43.2, 11.8), (46.5, 10.8), (51.2, 11.8),
        (51.3, 10.3), (47.5, 6), (44, 2), (41, -1.5), (39.5, -5),
        (40.5, -10.5), (38, -15.5), (35, -18.5), (36, -21.5), (35.3, -24),
        (32.7, -26.3), (30.5, -30.5), (27, -33.2), (22, -34.3), (20, -34.8),
        (18.3, -34), (17.5, -31), (15.5, -27.5), (14.5, -22.5), (12, -17.5),
        (13.5, -12), (12.5, -6), (9, -1), (9.3, 3.8), (7, 4.3), (3, 6.3),
        (-2, 5), (-5, 5), (-7.8, 4.3), (-12.5, 7.5), (-13.5, 9.5),
        (-16.5, 12.5), (-17.3, 14.8), (-16.3, 19.5), (-14.5, 22), (-13, 25.5),
        (-11.5, 28),
    ],
    "eurasia": [
        # Iberia and western Europe
        (-9.5, 36.8), (-8.8, 40), (-9, 43.2), (-5, 43.8), (-1.8, 43.6),
        (-4.7, 48.3), (-1.8, 49.5), (1.5, 51), (4, 52), (6.5, 53.5),
        (8.2, 55), (8.3, 57), (10.5, 57.8),
        # Norway coast up and over Scandinavia
        (7, 58), (5.3, 59), (5, 62), (10, 64.5), (14, 67.5), (18, 69.3),
        (24, 71), (28, 71), (31, 70), (33, 69), (40.5, 67.5), (44.5, 67),
        (44, 68.3), (52, 68.5), (54, 69), (60, 69.5), (66.5, 71), (72, 72.5),
        (75, 72), (79, 73), (86, 75.5), (97, 76.5), (105, 77.5), (113, 76),
        (120, 73.5), (130, 72), (140, 72.5), (150, 71), (160, 70), (170, 70),
        (178, 69), (186, 67), (190, 66), (186, 64.5), (181, 63), (178, 62.5),
        (172, 61), (165, 60), (163, 58), (162.5, 54), (156.7, 51),
        (155.5, 55), (153.5, 59), (147, 59.5), (141, 56), (138.5, 54),
        (141.5, 53), (140.2, 48.5), (137, 45), (133, 42.8), (131, 42.5),
        (129.7, 40.8), (129.5, 38), (129.3, 35.3), (126.3, 34.5), (126, 36.8),
        (125.5, 38.5), (124.2, 39.8), (121.2, 40.8), (117.8, 39.2),
        (119.2, 37.2), (118.8, 35), (120.3, 32.5), (121.8, 31), (120.2, 27.8),
        (116.8, 23.3), (113.8, 22.3), (110.3, 20.3), (108, 21.5),
        (105.8, 19.8), (105.8, 18.5), (108.5, 15.8), (109.2, 13),
        (107, 10.4), (104.8, 8.6), (100.3, 13.4), (99.2, 9.5), (100.3, 7),
        (103.2, 1.8), (101.3, 2.8), (98.8, 8), (98, 13), (97.7, 16),
        (94.5, 15.8), (91, 22.3), (89, 21.6), (86.8, 20.7), (83, 17.5),
        (80.3, 15.8), (80.3, 13), (79.8, 10.3), (77.5, 8.1), (76, 11),
        (72.8, 19), (72.5, 21.8), (69.5, 21.5), (67.5, 23.8), (66.5, 25.2),
        (61.5, 25.2), (57.5, 25.5), (56.8, 27), (53.8, 26.7), (50.8, 28.5),
        (48.5, 29.8), (48.8, 27.5), (51.2, 24.3), (54.3, 24.3), (56.3, 26.3),
        (58.5, 23.7), (59.8, 22.3), (57.8, 18.8), (55, 17), (52, 15.8),
        (47.5, 13.3), (43.5, 12.6), (42.8, 16.5), (40.8, 19.5), (39, 21.3),
        (37.8, 24.3), (35, 28), (34.6, 29.5), (34.3, 27.8), (33, 28.2),
        (32.6, 29.7), (33.2, 31), (34.8, 31.5), (35.8, 34.5), (36.2, 36.8),
        (32.8, 36.2), (30.5, 36.4), (27.5, 37), (26.3, 38.5), (26.5, 40.2),
        (24, 40.3), (22.8, 39.5), (23, 38), (21.5, 36.8), (20.2, 39.5),
        (19.3, 41.8), (16, 43.5), (13.7, 45.5), (15.5, 43.8),
        (18.4, 40.3), (16.8, 38.9), (15.7, 37.9), (15.9, 40), (12.5, 41.5),
        (10.5, 42.8), (8.8, 44.3), (6.2, 43.1), (3.2, 43.2), (0.5, 40.5),
        (-0.5, 38.3), (-2.2, 36.8), (-5.5, 36),
    ],
    "australia": [
        (113.8, -22), (113.5, -26), (115.2, -34.3), (119, -35), (124, -33),
        (129, -31.8), (134, -32.5), (138, -35.5), (139.8, -37.8), (145, -38.8),
        (147.5, -38), (150, -37.3), (153.6, -28.5), (153, -25.5), (150.8, -23),
        (148.8, -20.3), (146.3, -18.8), (145.5, -16.3), (144.5, -14.2),
        (142.5, -10.8), (141.5, -16.5), (139.8, -17.7), (136.8, -15.8),
        (135.8, -12.2), (132, -11.2), (130, -12.7), (129, -14.8), (126.8, -13.8),
        (122.3, -18), (117, -20.7),
    ],
    "antarctica": [
        (-180, -90), (180, -90), (180, -66.5), (150, -67), (110, -66),
        (75, -67.5), (30, -68.5), (0, -69.5), (-10, -70.5), (-58, -63.5),
        (-62, -65.5), (-75, -70), (-100, -72.5), (-130, -73.5), (-158, -75.5),
        (-180, -77),
    ],
    "madagascar": [(44, -16.2), (49.5, -12.2), (50.2, -15.8), (47.5, -24.8),
                   (43.8, -22)],
    "borneo": [(109.2, 1.8), (111, 2.8), (117.5, 7), (119.2, 1), (116, -3.8),
               (110.2, -1.8)],
    "sumatra": [(95.3, 5.7), (98.2, 3.8), (103, -0.5), (106, -3), (105.8, -5.8),
                (102.2, -4.2), (97.5, 1.5)],
    "java": [(105.2, -6.8), (110, -6.4), (114.4, -7.5), (114.6, -8.7),
             (108, -7.8)],
    "sulawesi": [(119, 0.8), (121, 1.3), (123.5, 0.5), (120.8, -2.5),
                 (120.3, -5.6), (119.3, -5.6), (119.8, -2)],
    "new_guinea": [(131, -0.5), (135.5, -1.5), (138, -2), (143, -4),
                   (146.5, -6.5), (150, -10.3), (147.5, -10.1), (143, -8.5),
                   (138.8, -7.5), (135, -4.2), (132, -2.8)],
    "japan": [(129.8, 31.2), (131.5, 31.5), (132, 33.2), (135.5, 33.5),
              (139.8, 35), (140.8, 35.8), (141.8, 39.5), (141.2, 42),
              (143.5, 42.5), (145.5, 43.5), (141.8, 45.5), (140, 43),
              (139.8, 40), (137, 37), (135.5, 35.5), (132, 34.5), (129.8, 32.5)],
    "philippines_luzon": [(119.8, 16), (120.2, 18.5), (122.2, 18.3),
                          (124, 13), (121.5, 13.5), (120.5, 14)],
    "philippines_mindanao": [(122, 7.8), (125.3, 9.8), (126.5, 7.2),
                             (125.5, 5.6), (122.2, 6.3)],
    "great_britain": [(-5.6, 50), (-0.5, 50.7), (1.6, 51.3), (0.3, 53),
                      (-1.8, 55.5), (-2.2, 57.5), (-5, 58.5), (-5.8, 56),
                      (-3.2, 54.5), (-4.8, 53.2), (-5.3, 51.7)],
    "ireland": [(-10.2, 51.7), (-6.2, 52.2), (-5.6, 54.4), (-8.2, 55.3),
                (-10, 53.5)],
    "iceland": [(-24, 63.8), (-18, 63.3), (-13.6, 64.5), (-15, 66.3),
                (-22, 66.2)],
    "nz_north": [(172.8, -34.4), (175.8, -37.3), (178.3, -37.6),
                 (176.5, -41.3), (174.6, -39.3), (173.8, -36.5)],
    "nz_south": [(172.6, -40.6), (174.3, -41.8), (171.5, -44.5),
                 (168.3, -46.7), (166.4, -45.8), (170.8, -42.7)],
    "sri_lanka": [(79.7, 9.8), (81.9, 7.6), (80.6, 5.9), (79.8, 7.5)],
    "cuba": [(-85, 22.1), (-79.3, 22.7), (-74.2, 20.2), (-77.7, 19.9),
             (-82.5, 21.8)],
    "hispaniola": [(-74.5, 18.3), (-71.7, 19.9), (-68.4, 18.6), (-71, 17.8)],
    "taiwan": [(120.1, 22.6), (121.2, 25.3), (122, 25), (120.9, 21.9)],
    "tasmania": [(144.6, -40.7), (148.3, -40.9), (147, -43.6), (145.2, -42.2)],
    "newfoundland": [(-59.3, 47.6), (-52.7, 47.3), (-53.5, 49.5),
                     (-56.2, 51.5), (-59.4, 49.8)],
}

WATER = {
    "baltic": [(9.8, 56.5), (10.8, 54.2), (20.5, 54.6), (28, 59.3),
               (29.8, 59.8), (26.5, 60.8), (22.5, 60.3), (22, 63),
               (25.2, 65.9), (20.8, 65.7), (19.5, 63), (17.3, 60.8),
               (16.8, 58.5), (11.5, 57.5)],
    "black_sea": [(27.8, 41.2), (41.5, 41.3), (40, 47), (36.5, 45.3),
                  (33, 46.2), (30.5, 46), (27.5, 42.5)],
    "caspian": [(47.2, 37.2), (54, 37), (54.2, 42), (52.8, 46.8),
                (47.3, 46.3), (46.8, 41.5)],
    "persian_gulf": [(47.7, 29.9), (51, 27.7), (56.2, 27.2), (56.5, 26),
                     (51.8, 24.2), (48, 28.3)],
    "hudson_bay": [(-94.8, 57), (-90.5, 63), (-78.3, 62), (-77.3, 55.5),
                   (-79.8, 51.8), (-87.5, 52), (-93.5, 54)],
}


def _prepared(rings):
    return [(name, prep(Polygon(ring))) for name, ring in sorted(rings.items())]


def build_mask(population_csv=None) -> bytes:
    land = _prepared(LAND)
    water = _prepared(WATER)
    cells = bytearray(ROWS * COLS)
    for row in range(ROWS):
        lat = 89.5 - row
        for col in range(COLS):
            lon = -179.5 + col
            hit = False
            for shift in (0.0, 360.0, -360.0):
                point = Point(lon + shift, lat)
                if any(poly.contains(point) for _, poly in land):
                    hit = True
                    break
            if hit:
                for shift in (0.0, 360.0, -360.0):
                    point = Point(lon + shift, lat)
                    if any(poly.contains(point) for _, poly in water):
                        hit = False
                        break
            cells[row * COLS + col] = 1 if hit else 0
    if population_csv is not None:
        with open(population_csv, newline="", encoding="utf-8") as f:
            for rec in csv.DictReader(f):
                lat, lon = float(rec["lat_deg"]), float(rec["lon_deg"])
                row = min(int(90 - lat), ROWS - 1)
                col = min(int(lon + 180), COLS - 1)
                cells[row * COLS + col] = 1
    return bytes(cells)


def render_ascii(cells: bytes) -> str:
    lines = []
    for row in range(0, ROWS, 3):
        line = []
        for col in range(0, COLS, 3):
            block = [cells[r * COLS + c]
                     for r in range(row, min(row + 3, ROWS))
                     for c in range(col, min(col + 3, COLS))]
            line.append("#" if sum(block) >= 5 else
                        ("." if sum(block) else " "))
        lines.append("".join(line))
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser()
    default_out = (Path(__file__).resolve().parent.parent / "src" / "qsspsim"
                   / "data" / "land_mask_1deg.bin")
    default_pop = default_out.parent / "population_centers.csv"
    ap.add_argument("--out", type=Path, default=default_out)
    ap.add_argument("--population", type=Path, default=default_pop)
    ap.add_argument("--ascii", action="store_true")
    args = ap.parse_args()

    pop = args.population if args.population.exists() else None
    cells = build_mask(pop)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(cells)
    fraction = sum(cells) / len(cells)
    print(f"wrote {args.out} ({sum(cells)} land cells, "
          f"{fraction:.1%} of grid)")
    if args.ascii:
        print(render_ascii(cells))


if __name__ == "__main__":
    main()
