import gdspy

# dimensions in um
gap = 0.225
pillar_d = 0.4
pitch = gap + pillar_d
across = 30
rows = 50
shift_fraction = 0.1
width = across * pitch
length = rows * pitch
bus_len, bus_w = 50, 20
port_r = 20

lib = gdspy.GdsLibrary()
cell = lib.new_cell("DLD")
cell.add(gdspy.Rectangle((0, -width / 2), (length, width / 2), layer=0))
cell.add(gdspy.Rectangle((-bus_len, -bus_w / 2), (0, bus_w / 2), layer=0))
cell.add(gdspy.Rectangle((length, -bus_w / 2), (length + bus_len, bus_w / 2), layer=0))
cell.add(gdspy.Round((-bus_len, 0), port_r, tolerance=0.05, layer=0))
cell.add(gdspy.Round((length + bus_len, 0), port_r, tolerance=0.05, layer=0))
for r in range(rows):
    shift = (r * shift_fraction) % 1.0 * pitch
    x = (r + 0.5) * pitch
    for c in range(across):
        y = -width / 2 + (c + 0.5) * pitch + shift
        if y + pillar_d / 2 > width / 2:
            continue
        cell.add(gdspy.Round((x, y), pillar_d / 2, tolerance=0.005, layer=1))
lib.write_gds("dld_chip.gds")
