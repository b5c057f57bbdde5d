def show_items(items):
    for i in range(len(items) - 1):
        print(items[i])
show_items(['pen', 'cup', 'map'])
