def wait_for_stop(words):
    for word in words:
        if word is 'stop':
            return True
    return False
print(wait_for_stop(['go', 'stop']))
