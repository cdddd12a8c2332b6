"""Published per-replicate rows with their printed Avg, STD and Conf columns."""

# (scenario, row label) -> (R1..R10, (avg, std, conf))
STAGE1 = {
    (1, "eta=0.1"): ([47.64, 46.78, 39.26, 56.63, 47.09, 67.29, 60.65, 38.76, 42.99, 44.86], (49.19, 8.90, 6.36)),
    (1, "eta=0.9"): ([145.90, 155.75, 168.04, 199.94, 171.94, 243.61, 162.15, 144.08, 103.82, 117.94], (161.32, 37.65, 26.93)),
    (1, "e_eta"): ([98.27, 108.97, 128.78, 143.31, 124.85, 176.33, 101.50, 105.33, 60.83, 73.08], (112.12, 31.70, 22.68)),
    (2, "eta=0.1"): ([45.71, 59.28, 47.39, 54.31, 58.14, 69.65, 50.27, 44.35, 43.90, 48.83], (52.18, 7.78, 5.56)),
    (2, "eta=0.9"): ([61.23, 57.63, 56.30, 81.25, 53.65, 74.69, 55.76, 40.86, 47.74, 52.03], (58.11, 11.36, 8.13)),
    (2, "e_eta"): ([15.52, -1.65, 8.91, 26.94, -4.49, 5.04, 5.49, -3.49, 3.85, 3.20], (5.93, 9.00, 6.44)),
    (3, "eta=0.1"): ([45.34, 47.09, 65.90, 54.05, 51.93, 84.91, 54.66, 41.11, 43.88, 52.21], (54.11, 12.23, 8.75)),
    (3, "eta=0.9"): ([213.49, 168.69, 197.52, 188.80, 171.62, 236.93, 174.46, 183.98, 84.95, 122.82], (174.32, 41.20, 29.47)),
    (3, "e_eta"): ([168.15, 121.59, 131.62, 134.75, 119.69, 152.02, 119.80, 142.87, 41.07, 70.61], (120.22, 35.90, 25.68)),
}

STAGE2 = {
    (1, "e_tauB"): ([-170.40, -146.54, -83.92, -55.00, -131.83, -6.05, -128.09, -110.66, -184.81, -152.86], (-117.02, 55.01, 39.35)),
    (1, "e_tauR"): ([165.32, 160.08, 95.83, 71.21, 149.41, 8.11, 133.20, 111.97, 167.79, 160.23], (122.31, 51.75, 37.02)),
    (1, "e_N"): ([1.78, 15.84, -9.18, 6.22, 6.74, 3.40, -13.50, 0.35, -14.64, -17.58], (-2.06, 11.04, 7.90)),
    (2, "e_tauB"): ([-122.99, -165.55, -144.34, -64.94, -168.15, -8.09, -154.27, -170.61, -189.59, -187.66], (-137.62, 58.31, 41.71)),
    (2, "e_tauR"): ([142.72, 177.17, 154.10, 77.45, 186.62, 24.03, 164.25, 172.21, 171.13, 172.02], (144.17, 52.25, 37.38)),
    (2, "e_N"): ([42.90, 1.75, 12.81, 19.08, 8.50, -1.08, -0.29, -12.17, 25.41, -15.03], (8.19, 17.62, 12.61)),
    (3, "e_tauB"): ([-151.65, -140.59, -132.44, -35.97, -166.98, -7.63, -159.37, -171.89, -194.38, -163.85], (-132.47, 61.12, 43.72)),
    (3, "e_tauR"): ([157.63, 152.23, 147.97, 38.06, 176.90, 16.03, 175.96, 163.48, 171.95, 174.82], (137.50, 59.31, 42.43)),
    (3, "e_N"): ([2.27, 22.60, 15.16, 14.70, 21.23, 4.64, 5.73, 10.22, 20.50, 8.15], (12.52, 7.38, 5.28)),
}
